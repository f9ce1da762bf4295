// clab <command> --scene <path> [--out <dir>] [--grid N] [--lens Q2|Q3|Q4|Q5] [--seed-density D]
//
// Exit status: 0 success, 1 verification failure, 2 usage or scene error,
// 3 I/O error, 4 any other library error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "clab/commands.hpp"
#include "clab/error.hpp"

namespace {

int status_of(clab::ErrorCode code) {
  switch (code) {
    case clab::ErrorCode::ParseError:
    case clab::ErrorCode::SchemaError:
    case clab::ErrorCode::RangeError: return 2;
    case clab::ErrorCode::IoError: return 3;
    default: return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binary differential equations of line congruences"};
  std::string command, scene_path, out_dir, lens;
  int grid = 0;
  double seed_density = 0.0;
  app.add_option("command", command, "verify | classify | trace | surfaces | render | report")
      ->required()
      ->check(CLI::IsMember(clab::command_names()));
  app.add_option("--scene", scene_path, "scene file (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides outputs.dir)");
  app.add_option("--grid", grid, "grid resolution (overrides grid)");
  app.add_option("--lens", lens, "Q2 | Q3 | Q4 | Q5 (overrides lens)");
  app.add_option("--seed-density", seed_density, "portrait seeds per unit length (overrides seed_density)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::ifstream in(scene_path, std::ios::binary);
    if (!in) throw clab::Error(clab::ErrorCode::IoError, "cannot read scene " + scene_path);
    std::stringstream text;
    text << in.rdbuf();
    clab::Scene scene = clab::parse_scene(text.str());
    if (!out_dir.empty()) scene.outputs.dir = out_dir;
    if (app.count("--grid")) {
      clab::check_grid(grid);
      scene.grid = grid;
    }
    if (app.count("--lens")) {
      const auto l = clab::parse_lens(lens);
      if (!l) throw clab::Error(clab::ErrorCode::RangeError, "--lens must be one of Q2, Q3, Q4, Q5");
      scene.lens = *l;
    }
    if (app.count("--seed-density")) {
      clab::check_seed_density(seed_density);
      scene.seed_density = seed_density;
    }
    return clab::run_command(command, scene, std::cout);
  } catch (const clab::Error& e) {
    std::cerr << "clab: " << e.what() << '\n';
    return status_of(e.code());
  } catch (const std::exception& e) {
    std::cerr << "clab: " << e.what() << '\n';
    return 4;
  }
}
