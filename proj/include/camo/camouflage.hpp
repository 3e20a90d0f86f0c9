#pragma once

#include <string>
#include <vector>

#include "camo/netlist.hpp"
#include "camo/selection.hpp"

namespace camo {

struct KeyEntry {
    std::string instance;             // camouflaged mux instance name
    int width = 2;                    // data input count
    std::string output;               // net the mux drives
    std::vector<std::string> inputs;  // data inputs in emitted pin order
    int selected = 0;                 // position of the real input
};

struct CamoKey {
    std::string circuit;
    std::vector<KeyEntry> entries;
};

struct CamouflageResult {
    Netlist attacker_view;
    CamoKey key;
};

// Insert one opaque mux per plan entry: a fresh net <target>_camo_<k> takes
// over the chosen sink pin and a camomuxN gate camo_NNNN drives it with the
// plan's mux inputs. The attacker view records which nets feed each mux but
// nothing about which one is real; that lives only in the key.
CamouflageResult camouflage_circuit(const Netlist& nl,
                                    const CamouflagePlan& plan);

// Replace every camouflaged mux with a buffer from its selected input. The
// instance and net names survive, so the result diffs cleanly against the
// attacker view. Every mux in the netlist must appear in the key.
Netlist apply_key(const Netlist& attacker_view, const CamoKey& key);

// JSON document {"circuit": ..., "muxes": [{"instance", "width", "output",
// "inputs", "selected"}]}. import_key validates the schema and rejects
// out-of-range positions.
std::string export_key(const CamoKey& key);
CamoKey import_key(const std::string& text);

CamoKey read_key_file(const std::string& path);
void write_key_file(const CamoKey& key, const std::string& path);

}  // namespace camo
