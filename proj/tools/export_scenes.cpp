// Regenerates the sample scene files:  export_scenes <outdir>
#include <torwave/presets.hpp>
#include <torwave/scene_io.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    using namespace torwave;
    std::string dir = argc > 1 ? argv[1] : "scenes";
    std::filesystem::create_directories(dir);
    std::vector<std::pair<std::string, std::string>> jobs = {
        {"checkerboard2d:a", "checkerboard_a.json"},
        {"checkerboard2d:b", "checkerboard_b.json"},
        {"straight_prisms", "straight_prisms.json"},
        {"sloped_prisms:1/10,1/10,1/10,1/10", "sloped_prisms.json"},
        {"tunnel_d:3", "tunnel_3d.json"},
        {"full:1,1", "full_square.json"},
    };
    for (const auto& [spec, file] : jobs) {
        Scene sc = preset_scene(spec);
        save_scene(sc, dir + "/" + file);
        std::printf("%s -> %s/%s\n", spec.c_str(), dir.c_str(), file.c_str());
    }
    return 0;
}
