#pragma once

#include <array>
#include <string>
#include <vector>

#include "terank/evaluation.hpp"

namespace terank::test {

struct SpotCheck {
  const char* file;
  const char* model;
  const char* dataset;
  const char* regime;
  const char* pool;
  double accuracy;
};

// Reference cells, checked by hand against the source tables.
inline const std::array<SpotCheck, 10> kTruthSpotChecks = {{
    {"supervised_vanilla.csv", "ResNet-50", "Aircraft", "vanilla", "supervised", 84.64},
    {"self_supervised_vanilla.csv", "BYOL", "DTD", "vanilla", "self_supervised", 76.37},
    {"supervised_lft.csv", "InceptionV3", "Cars", "lft", "supervised", 27.6},
    {"supervised_lbft.csv", "InceptionV3", "Aircraft", "lbft", "supervised", 47.98},
    {"supervised_lbft.csv", "InceptionV3", "Caltech-101", "lbft", "supervised", 90.25},
    {"supervised_vanilla.csv", "MobileNetV2", "Caltech-101", "vanilla", "supervised", 88.64},
    {"supervised_lft.csv", "MNet-A1", "Flowers", "lft", "supervised", 92.37},
    {"self_supervised_lft.csv", "MoCov1", "CIFAR100", "lft", "self_supervised", 15.68},
    {"self_supervised_lbft.csv", "Sela-v2", "VOC", "lbft", "self_supervised", 85.19},
    {"self_supervised_vanilla.csv", "Deepclusterv2", "Food-101", "vanilla", "self_supervised", 87.24},
}};

struct PinnedFile {
  const char* file;
  std::uint64_t fnv1a64;
  std::size_t rows;
};

inline const std::array<PinnedFile, 6> kTruthFiles = {{
    {"supervised_vanilla.csv", 0x2786538fdc7b33c5ull, 121},
    {"supervised_lbft.csv", 0x9feb458e309984eeull, 121},
    {"supervised_lft.csv", 0x1c44c38d9ec83744ull, 121},
    {"self_supervised_vanilla.csv", 0x9a7c4b6c6ab10ca4ull, 132},
    {"self_supervised_lbft.csv", 0xf353dbee5efa4c40ull, 132},
    {"self_supervised_lft.csv", 0xe2adfee7f506a5f0ull, 132},
}};

inline const std::array<const char*, 11> kDatasets = {"Aircraft", "Caltech-101", "Cars",  "CIFAR10",
                                                      "CIFAR100", "DTD",         "Flowers", "Food-101",
                                                      "Pets",     "Sun",         "VOC"};

// Per-dataset tau_w of LogME and SA+LogME, vanilla fine-tuning, supervised pool.
inline const std::array<double, 11> kLogmeBefore = {0.439, 0.497, 0.605, 0.852, 0.725, 0.700,
                                                    0.147, 0.385, 0.411, 0.511, 0.695};
inline const std::array<double, 11> kLogmeAfter = {0.442, 0.655, 0.603, 0.924, 0.855, 0.784,
                                                   0.743, 0.665, 0.447, 0.788, 0.782};
inline constexpr double kExpectedImprovementPct = 28.84;

inline std::vector<RankingReport> reports_from(const std::array<double, 11>& taus, const std::string& mode) {
  std::vector<RankingReport> out;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    RankingReport r;
    r.metric = "logme";
    r.dataset = kDatasets[i];
    r.regime = "vanilla";
    r.pool = "supervised";
    r.perturb_mode = mode;
    r.tau_w = taus[i];
    out.push_back(r);
  }
  return out;
}

}  // namespace terank::test
