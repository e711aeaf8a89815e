#pragma once

#include <filesystem>
#include <string>

#include "oefd/trainer.hpp"

namespace oefd {

// Structured-text (JSON) checkpoint, format_version 1. Parameters are written
// as decimal arrays in shortest round-trip form, so save -> load -> save is a
// byte-level fixpoint and every value reloads bit-exactly.
std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace oefd
