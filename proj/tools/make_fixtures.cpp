// Regenerates the small fixtures under data/. Usage: rde_make_fixtures <dir>
#include <filesystem>
#include <iostream>
#include <string>

#include "rde/io.hpp"
#include "rde/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: rde_make_fixtures <dir>\n";
    return 2;
  }
  namespace fs = std::filesystem;
  using namespace rde;
  const fs::path dir = argv[1];
  fs::create_directories(dir / "planted");

  io::write_text(dir / "and2.tt", "2\n0001\n");
  io::write_text(dir / "or3.tt", "3\n01111111\n");

  const synthetic::PlantedTask task = synthetic::planted_task(20, 3, 1);
  save_network_file(task.net, dir / "planted" / "network.json");
  io::write_text(dir / "planted" / "stats.json", io::reference_to_json(task.reference));
  Matrix inputs(2, 20);
  inputs.row(0) = task.x.transpose();
  inputs.row(1) = synthetic::uniform_vector(20, 2).transpose();
  io::write_text(dir / "planted" / "input.csv", io::csv_matrix(inputs));
  std::string relevant;
  for (std::size_t i : task.relevant) relevant += (relevant.empty() ? "" : ",") + std::to_string(i);
  io::write_text(dir / "planted" / "relevant.txt", relevant + "\n");

  synthetic::RandomNetworkSpec small{6, {5}, 1, 2.0, 0.5};
  save_network_file(synthetic::random_network(small, 4), dir / "small_network.json");

  io::write_text(dir / "samples.csv", io::csv_matrix(synthetic::uniform_data(100, 6, 3)));
  return 0;
}
