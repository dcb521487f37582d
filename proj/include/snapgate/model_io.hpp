#pragma once

#include <filesystem>
#include <iosfwd>

#include "snapgate/gate.hpp"

namespace snapgate {

inline constexpr int kModelFormatVersion = 1;

/// JSON model file holding the pipeline preprocessing, the LDA parameters,
/// speed calibration, the wake templates verbatim, and any threshold
/// calibration. Doubles are written with round-trip precision, so a loaded
/// model scores bit-identically to the one that was saved.
void save_model(std::ostream& out, const ModelBundle& models);
void save_model(const std::filesystem::path& path, const ModelBundle& models);
ModelBundle load_model(std::istream& in);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace snapgate
