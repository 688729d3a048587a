#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "lyricgenre/svm.hpp"

namespace lyricgenre {

inline constexpr int kModelFormatVersion = 1;

/// Models whose representation tag starts with "bow" store weights as sparse
/// index/value pairs; others store a dense array. Doubles are written in
/// shortest round-trip form, so load(save(m)) reproduces every value exactly.
nlohmann::json model_to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const LinearModel& model);
LinearModel load_model(const std::filesystem::path& path);

/// Loads every *.model.json under a directory (sorted by file name), or a
/// single model file.
std::vector<LinearModel> load_models(const std::filesystem::path& path);

/// File name used for a genre's model inside a model directory.
std::string model_file_name(const std::string& genre);

}  // namespace lyricgenre
