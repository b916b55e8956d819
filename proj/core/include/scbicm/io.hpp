#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "scbicm/bitmap.hpp"
#include "scbicm/channel.hpp"
#include "scbicm/lifting.hpp"
#include "scbicm/protograph.hpp"
#include "scbicm/simulator.hpp"

namespace scbicm {

struct IOError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// shortest exact decimal form (%.17g round-trips doubles losslessly)
std::string format_double(double v);

void save_protograph(const Protograph& g, const std::string& path);
Protograph load_protograph(const std::string& path);

// Ensemble description file: {"family": "single"|"loop"|"continuous"|"custom",
// "params": {...}, optional "chains", "connect_positions", "connecting_end",
// "edges"}.  Returns the built graph.
Protograph build_ensemble_file(const std::string& path);

void save_profile(const ErasureProfile& p, const std::string& path);
ErasureProfile load_profile(const std::string& path);

void save_bitmap(const BitMapping& map, const std::string& path);
// full matrix or grouped table, detected from the directives present
BitMapping load_bitmap(const std::string& path);

void save_lifted(const LiftedCode& code, const std::string& path);
LiftedCode load_lifted(const std::string& path);

void save_assignment(const ChannelAssignment& a, const std::string& path);
ChannelAssignment load_assignment(const std::string& path);

void save_ber_csv(const std::vector<BERRecord>& records, long code_bits, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace scbicm
