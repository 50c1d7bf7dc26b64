#pragma once

#include <iosfwd>
#include <string>

#include "qgap/circuits.hpp"

namespace qgap {

VerifierCircuit parse_circuit(std::istream& is);
VerifierCircuit load_circuit(const std::string& path);
void write_circuit(std::ostream& os, const VerifierCircuit& circuit);

}  // namespace qgap
