#include "lyricgenre/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>

#include "lyricgenre/error.hpp"
#include "lyricgenre/random.hpp"

namespace lyricgenre {

using nlohmann::json;

namespace {

bool is_sparse_tag(const std::string& tag) { return tag.rfind("bow", 0) == 0; }

const char* source_name(CentroidSource s) { return s == CentroidSource::train_set ? "train-set" : "test-corpus"; }

CentroidSource parse_source(const std::string& s) {
  if (s == "train-set") return CentroidSource::train_set;
  if (s == "test-corpus") return CentroidSource::test_corpus;
  throw DataError("unknown centroid source '" + s + "'");
}

}  // namespace

json model_to_json(const LinearModel& model) {
  json j;
  j["format"] = "lyricgenre-linear-model";
  j["version"] = kModelFormatVersion;
  j["genre"] = model.genre;
  j["representation_tag"] = model.representation_tag;
  j["dimension"] = model.weights.size();
  j["c"] = model.c;
  j["bias"] = model.bias;
  j["seed"] = model.seed;
  if (is_sparse_tag(model.representation_tag)) {
    json idx = json::array(), val = json::array();
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      if (model.weights[i] != 0.0) {
        idx.push_back(i);
        val.push_back(model.weights[i]);
      }
    }
    j["weights"] = {{"sparse", true}, {"indices", idx}, {"values", val}};
  } else {
    j["weights"] = model.weights;
  }
  if (model.centroid) {
    j["centroid"] = {{"source", source_name(model.centroid->source)}, {"mean", model.centroid->mean}};
  } else {
    j["centroid"] = nullptr;
  }
  return j;
}

LinearModel model_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw DataError("unsupported model version " + j.at("version").dump());
    }
    LinearModel m;
    m.genre = j.at("genre").get<std::string>();
    m.representation_tag = j.at("representation_tag").get<std::string>();
    const auto dim = j.at("dimension").get<std::size_t>();
    m.c = j.at("c").get<double>();
    m.bias = j.at("bias").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& w = j.at("weights");
    if (w.is_array()) {
      m.weights = w.get<std::vector<double>>();
    } else {
      m.weights.assign(dim, 0.0);
      const auto idx = w.at("indices").get<std::vector<std::size_t>>();
      const auto val = w.at("values").get<std::vector<double>>();
      if (idx.size() != val.size()) throw DataError("sparse weights: index/value count mismatch");
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= dim) throw DataError("sparse weights: index out of range");
        m.weights[idx[k]] = val[k];
      }
    }
    if (m.weights.size() != dim) throw DataError("weights do not match declared dimension");
    if (j.contains("centroid") && !j["centroid"].is_null()) {
      CentroidTransform t;
      t.source = parse_source(j["centroid"].at("source").get<std::string>());
      t.mean = j["centroid"].at("mean").get<std::vector<double>>();
      if (t.mean.size() != dim) throw DataError("centroid does not match declared dimension");
      m.centroid = std::move(t);
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const LinearModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << model_to_json(model).dump(1) << '\n';
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return model_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<LinearModel> load_models(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return {load_model(path)};
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 11 && name.ends_with(".model.json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no *.model.json files in '" + path.string() + "'");
  std::vector<LinearModel> models;
  for (const auto& f : files) models.push_back(load_model(f));
  return models;
}

std::string model_file_name(const std::string& genre) {
  std::string name;
  for (unsigned char c : genre) {
    if (std::isalnum(c)) {
      name.push_back(static_cast<char>(std::tolower(c)));
    } else if (!name.empty() && name.back() != '_') {
      name.push_back('_');
    }
  }
  while (!name.empty() && name.back() == '_') name.pop_back();
  if (name.empty()) name = "genre";
  // distinct genres like "Pop/Rock" and "Pop Rock" must not collide
  char hex[9];
  std::snprintf(hex, sizeof hex, "%08x", static_cast<unsigned>(fnv1a64(genre) & 0xffffffffu));
  return name + "-" + hex + ".model.json";
}

}  // namespace lyricgenre
