#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "advfront/matrix.hpp"

namespace advfront {

/// Feature rows in [0,1]^d with integer labels in [0, num_classes).
struct LabeledDataset {
    Matrix features;
    std::vector<int> labels;
    std::size_t num_classes = 0;
    std::string name;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t dim() const noexcept { return features.cols(); }

    /// Throws InputError on out-of-range features or labels, ShapeError on
    /// a row/label count mismatch.
    void validate() const;

    LabeledDataset subset(const std::vector<std::size_t>& indices) const;
};

/// Gaussian blobs around class centres 0.5 + (separation / 2) * u_k, where
/// u_k are evenly spaced unit directions in the plane of the first two
/// coordinates (first coordinate only when d == 1). If any sample leaves
/// [0,1]^d the whole set is contracted towards 0.5 by one common factor.
LabeledDataset gen_blobs(std::size_t n_per_class, std::size_t num_classes, std::size_t d, double separation,
                         double noise_sigma, std::uint64_t seed);

/// Two interleaving half circles in 2D, mapped into [0,1]^2.
LabeledDataset gen_moons(std::size_t n_per_class, double noise_sigma, std::uint64_t seed);

/// side x side grey images (d = side^2). Class k brightens one half of the
/// image (top, bottom, left, right for k = 0..3) on a darker background,
/// plus Gaussian pixel noise. num_classes must be in 2..4.
LabeledDataset gen_images(std::size_t n_per_class, std::size_t num_classes, std::size_t side, double noise_sigma,
                          std::uint64_t seed);

/// CSV with header `label,f0,...,f{d-1}`. num_classes is max label + 1.
LabeledDataset read_csv(std::istream& in, const std::string& name = "csv");
void write_csv(const LabeledDataset& dataset, std::ostream& out);
LabeledDataset load_csv(const std::filesystem::path& path);
void save_csv(const LabeledDataset& dataset, const std::filesystem::path& path);

/// Stratified, seeded split into (train, test). The test side receives
/// round(n * test_fraction) rows, distributed over classes by largest
/// remainder.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& dataset, double test_fraction,
                                                std::uint64_t seed);

}  // namespace advfront
