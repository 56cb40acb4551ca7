#pragma once

#include "aisplan/ais.hpp"

#include <string>

namespace aisplan {

std::string serialize_certificate(const AisCertificate& c);
AisCertificate parse_certificate(const std::string& text);

/// JSON document with spaces, tables, maps and the declared certificate.
/// Compressions of known kinds are stored by descriptor; custom compressions
/// are tabulated over the reachable histories of `model` up to `horizon`
/// when both are given, and omitted otherwise.
std::string serialize_generator(const AisGenerator& gen, const PomdpModel* model = nullptr,
                                std::size_t horizon = 0);
/// Rebuilds the compression from the descriptor; `model` is required for
/// belief and MDP kinds.
AisGenerator parse_generator(const std::string& text, const PomdpModel* model = nullptr);

} // namespace aisplan
