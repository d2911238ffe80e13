// Writes the bundled street scene (PLY clouds plus scenario.json) and the
// two-camera scene into the given directory (default: scenes).
#include <filesystem>
#include <iostream>

#include "chase/io.hpp"
#include "chase/ply.hpp"
#include "chase/scenario.hpp"
#include "chase/scenes.hpp"

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("scenes");
  try {
    const fs::path street = root / "street";
    fs::create_directories(street);
    chase::save_ply(street / "actor.ply", chase::make_pedestrian(11));
    chase::save_ply(street / "background.ply", chase::make_street_background(12));
    const auto scenario = chase::make_street_scenario("actor.ply", "background.ply");
    chase::write_file_atomic(street / "scenario.json", chase::scenario_to_json(scenario).dump(2) + "\n");

    const fs::path two = root / "two_camera";
    fs::create_directories(two);
    const auto scene = chase::make_two_camera_scene(13);
    chase::save_ply(two / "actor.ply", scene.clouds.actor);
    chase::save_ply(two / "background.ply", scene.clouds.background);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "wrote scenes under " << root << "\n";
  return 0;
}
