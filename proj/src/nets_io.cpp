#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "uilab/matrix_io.hpp"
#include "uilab/nets.hpp"

namespace uilab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string layer_file(Index k, const char* tag) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "layer%03d_%s.bin", static_cast<int>(k), tag);
  return buf;
}

}  // namespace

void save_params(const std::string& dir, const NetworkParams& params,
                 std::uint64_t seed, const std::string& provenance) {
  params.validate();
  fs::create_directories(dir);
  json manifest;
  manifest["format"] = "uilab-net-v1";
  manifest["variant"] = params.variant == Variant::kFull ? "full" : "coupled";
  manifest["k"] = params.depth();
  manifest["m"] = params.m();
  manifest["n"] = params.n();
  manifest["seed"] = seed;
  manifest["provenance"] = provenance;
  std::vector<double> thetas;
  std::vector<Index> ss_counts;
  for (Index k = 0; k < params.depth(); ++k) {
    const auto& l = params.layers[static_cast<std::size_t>(k)];
    thetas.push_back(l.theta);
    ss_counts.push_back(l.ss_count);
    if (params.variant == Variant::kFull) {
      save_matrix_binary((fs::path(dir) / layer_file(k, "W1")).string(), l.W1);
      save_matrix_binary((fs::path(dir) / layer_file(k, "W2")).string(), l.W2);
    } else {
      save_matrix_binary((fs::path(dir) / layer_file(k, "W")).string(), l.W);
    }
  }
  manifest["thetas"] = thetas;
  manifest["ss_counts"] = ss_counts;
  std::ofstream os(fs::path(dir) / "manifest.json");
  if (!os) throw std::runtime_error("cannot write manifest in " + dir);
  os << manifest.dump(2) << '\n';
}

LoadedParams load_params(const std::string& dir) {
  std::ifstream is(fs::path(dir) / "manifest.json");
  if (!is) throw std::runtime_error("no manifest.json in " + dir);
  json manifest = json::parse(is);
  if (manifest.value("format", "") != "uilab-net-v1")
    throw std::runtime_error("unknown checkpoint format in " + dir);

  LoadedParams out;
  out.seed = manifest.value("seed", 0ull);
  out.provenance = manifest.value("provenance", "");
  out.params.variant = manifest.at("variant") == "full" ? Variant::kFull : Variant::kCoupled;
  const Index K = manifest.at("k").get<Index>();
  const auto thetas = manifest.at("thetas").get<std::vector<double>>();
  const auto ss_counts = manifest.at("ss_counts").get<std::vector<Index>>();
  if (thetas.size() != static_cast<std::size_t>(K) || ss_counts.size() != static_cast<std::size_t>(K))
    throw std::runtime_error("manifest layer lists do not match k in " + dir);
  for (Index k = 0; k < K; ++k) {
    LayerParams l;
    l.theta = thetas[static_cast<std::size_t>(k)];
    l.ss_count = ss_counts[static_cast<std::size_t>(k)];
    if (out.params.variant == Variant::kFull) {
      l.W1 = load_matrix_binary((fs::path(dir) / layer_file(k, "W1")).string());
      l.W2 = load_matrix_binary((fs::path(dir) / layer_file(k, "W2")).string());
    } else {
      l.W = load_matrix_binary((fs::path(dir) / layer_file(k, "W")).string());
    }
    out.params.layers.push_back(std::move(l));
  }
  out.params.validate();
  return out;
}

}  // namespace uilab
