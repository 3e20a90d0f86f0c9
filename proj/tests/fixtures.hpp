#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "camo/netlist.hpp"

namespace fixtures {

// ISCAS85 c17: six 2-input NANDs, the standard warm-up circuit.
inline const char* c17_source() {
    return R"(module c17 (N1, N2, N3, N6, N7, N22, N23);
input N1, N2, N3, N6, N7;
output N22, N23;
wire N10, N11, N16, N19;
nand NAND2_1 (N10, N1, N3);
nand NAND2_2 (N11, N3, N6);
nand NAND2_3 (N16, N2, N11);
nand NAND2_4 (N19, N11, N7);
nand NAND2_5 (N22, N10, N16);
nand NAND2_6 (N23, N16, N19);
endmodule
)";
}

inline camo::Netlist c17() { return camo::parse_netlist(c17_source()); }

inline std::string bench_path(const std::string& file) {
    return std::string(CAMO_BENCH_DIR) + "/" + file;
}

// Fresh per-test scratch directory under the build tree.
inline std::string scratch_dir(const std::string& name) {
    std::filesystem::path p = std::filesystem::path(CAMO_SCRATCH_DIR) / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace fixtures
