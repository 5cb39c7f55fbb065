#include "advfront/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "advfront/error.hpp"

namespace advfront {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

double parse_double(std::string_view text, std::size_t line) {
    // from_chars for double is not available in every libstdc++ we target.
    const std::string copy(text);
    char* end = nullptr;
    const double v = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size() || !std::isfinite(v)) {
        throw ParseError("cannot parse feature '" + copy + "'", line);
    }
    return v;
}

int parse_label(std::string_view text, std::size_t line) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("cannot parse label '" + std::string(text) + "'", line);
    }
    if (v < 0) {
        throw InputError("negative label " + std::to_string(v) + " (line " + std::to_string(line) + ")");
    }
    return v;
}

LabeledDataset assemble(std::vector<double> values, std::vector<int> labels, std::size_t d,
                        std::size_t num_classes, std::string name, std::uint64_t seed) {
    LabeledDataset ds;
    ds.features = Matrix(labels.size(), d, std::move(values));
    ds.labels = std::move(labels);
    ds.num_classes = num_classes;
    ds.name = std::move(name);
    ds.seed = seed;
    ds.validate();
    return ds;
}

// Contracts every sample towards 0.5 by a single factor when any coordinate
// falls outside the unit box.
void contract_into_unit_box(std::vector<double>& values) {
    double reach = 0.5;
    for (double v : values) {
        reach = std::max(reach, std::abs(v - 0.5));
    }
    if (reach <= 0.5) {
        return;
    }
    const double factor = 0.5 / reach;
    for (double& v : values) {
        v = std::clamp(0.5 + (v - 0.5) * factor, 0.0, 1.0);
    }
}

}  // namespace

void LabeledDataset::validate() const {
    if (features.rows() != labels.size()) {
        throw ShapeError("dataset has " + std::to_string(features.rows()) + " rows but " +
                         std::to_string(labels.size()) + " labels");
    }
    for (std::size_t r = 0; r < features.rows(); ++r) {
        for (double v : features.row(r)) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw InputError("feature outside [0,1] in row " + std::to_string(r));
            }
        }
        if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= num_classes) {
            throw InputError("label " + std::to_string(labels[r]) + " outside [0, " + std::to_string(num_classes) +
                             ") in row " + std::to_string(r));
        }
    }
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& indices) const {
    LabeledDataset out;
    out.features = features.gather_rows(indices);
    out.labels.reserve(indices.size());
    for (auto i : indices) {
        out.labels.push_back(labels[i]);
    }
    out.num_classes = num_classes;
    out.name = name;
    out.seed = seed;
    return out;
}

LabeledDataset gen_blobs(std::size_t n_per_class, std::size_t num_classes, std::size_t d, double separation,
                         double noise_sigma, std::uint64_t seed) {
    if (!(separation > 0.0)) {
        throw ConfigError("--separation: must be > 0");
    }
    if (num_classes < 2 || d < 1) {
        throw ConfigError("blobs need at least two classes and one feature");
    }
    if (noise_sigma < 0.0) {
        throw ConfigError("--noise: must be >= 0");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> values;
    std::vector<int> labels;
    values.reserve(n_per_class * num_classes * d);
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::vector<double> centre(d, 0.5);
        const double angle = std::numbers::pi * 2.0 * static_cast<double>(c) / static_cast<double>(num_classes);
        if (d == 1) {
            centre[0] += separation / 2.0 * (num_classes == 2 ? (c == 0 ? -1.0 : 1.0)
                                                               : -1.0 + 2.0 * static_cast<double>(c) /
                                                                            static_cast<double>(num_classes - 1));
        } else {
            centre[0] += separation / 2.0 * -std::cos(angle);
            centre[1] += separation / 2.0 * -std::sin(angle);
        }
        for (std::size_t i = 0; i < n_per_class; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                values.push_back(centre[k] + (noise_sigma > 0.0 ? noise_sigma * gauss(rng) : 0.0));
            }
            labels.push_back(static_cast<int>(c));
        }
    }
    contract_into_unit_box(values);
    return assemble(std::move(values), std::move(labels), d, num_classes, "blobs", seed);
}

LabeledDataset gen_moons(std::size_t n_per_class, double noise_sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> values;
    std::vector<int> labels;
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const double t = n_per_class > 1
                                 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_per_class - 1)
                                 : 0.0;
            double x = c == 0 ? std::cos(t) : 1.0 - std::cos(t);
            double y = c == 0 ? std::sin(t) : 0.5 - std::sin(t);
            x += noise_sigma * gauss(rng);
            y += noise_sigma * gauss(rng);
            values.push_back(std::clamp((x + 1.25) / 3.5, 0.0, 1.0));
            values.push_back(std::clamp((y + 0.75) / 2.5, 0.0, 1.0));
            labels.push_back(c);
        }
    }
    return assemble(std::move(values), std::move(labels), 2, 2, "moons", seed);
}

LabeledDataset gen_images(std::size_t n_per_class, std::size_t num_classes, std::size_t side, double noise_sigma,
                          std::uint64_t seed) {
    if (num_classes < 2 || num_classes > 4) {
        throw ConfigError("--classes: synthetic images support 2..4 classes");
    }
    if (side < 2) {
        throw ConfigError("--side: images need side >= 2");
    }
    constexpr double kDark = 0.3;
    constexpr double kBright = 0.7;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> values;
    std::vector<int> labels;
    const std::size_t half = side / 2;
    for (std::size_t c = 0; c < num_classes; ++c) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            for (std::size_t y = 0; y < side; ++y) {
                for (std::size_t x = 0; x < side; ++x) {
                    bool bright = false;
                    switch (c) {
                        case 0: bright = y < half; break;
                        case 1: bright = y >= side - half; break;
                        case 2: bright = x < half; break;
                        default: bright = x >= side - half; break;
                    }
                    const double base = bright ? kBright : kDark;
                    values.push_back(std::clamp(base + noise_sigma * gauss(rng), 0.0, 1.0));
                }
            }
            labels.push_back(static_cast<int>(c));
        }
    }
    return assemble(std::move(values), std::move(labels), side * side, num_classes, "images", seed);
}

LabeledDataset read_csv(std::istream& in, const std::string& name) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("missing CSV header", 1);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = split_fields(line);
    if (header.empty() || header[0] != "label") {
        throw ParseError("CSV header must start with 'label'", line_no);
    }
    const std::size_t d = header.size() - 1;
    for (std::size_t k = 0; k < d; ++k) {
        if (header[k + 1] != "f" + std::to_string(k)) {
            throw ParseError("CSV header column " + std::to_string(k + 1) + " must be f" + std::to_string(k),
                             line_no);
        }
    }
    std::vector<double> values;
    std::vector<int> labels;
    int max_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != d + 1) {
            throw ParseError("expected " + std::to_string(d + 1) + " fields, got " + std::to_string(fields.size()),
                             line_no);
        }
        const int label = parse_label(fields[0], line_no);
        for (std::size_t k = 0; k < d; ++k) {
            const double v = parse_double(fields[k + 1], line_no);
            if (v < 0.0 || v > 1.0) {
                throw InputError("feature f" + std::to_string(k) + " = " + std::string(fields[k + 1]) +
                                 " outside [0,1] (line " + std::to_string(line_no) + ")");
            }
            values.push_back(v);
        }
        labels.push_back(label);
        max_label = std::max(max_label, label);
    }
    const auto classes = static_cast<std::size_t>(max_label + 1);
    return assemble(std::move(values), std::move(labels), d, classes, name, 0);
}

void write_csv(const LabeledDataset& dataset, std::ostream& out) {
    out << "label";
    for (std::size_t k = 0; k < dataset.dim(); ++k) {
        out << ",f" << k;
    }
    out << '\n';
    char buf[32];
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        out << dataset.labels[r];
        for (double v : dataset.features.row(r)) {
            std::snprintf(buf, sizeof buf, "%.10g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

LabeledDataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open dataset file " + path.string());
    }
    return read_csv(in, path.stem().string());
}

void save_csv(const LabeledDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write dataset file " + path.string());
    }
    write_csv(dataset, out);
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& dataset, double test_fraction,
                                                std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("--test-fraction: must lie strictly between 0 and 1");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        by_class[dataset.labels[i]].push_back(i);
    }
    std::mt19937_64 rng(seed);
    const auto total = static_cast<std::size_t>(std::llround(static_cast<double>(dataset.size()) * test_fraction));

    // Largest-remainder apportionment of `total` test slots over classes.
    struct Share {
        int label;
        std::size_t take;
        double remainder;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (auto& [label, idx] : by_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
        const double exact = static_cast<double>(idx.size()) * test_fraction;
        const auto take = static_cast<std::size_t>(std::floor(exact));
        shares.push_back({label, take, exact - static_cast<double>(take)});
        assigned += take;
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return shares[a].remainder > shares[b].remainder; });
    for (std::size_t k = 0; assigned < total && k < order.size(); ++k) {
        auto& s = shares[order[k]];
        if (s.take < by_class[s.label].size()) {
            ++s.take;
            ++assigned;
        }
    }

    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (const auto& s : shares) {
        const auto& idx = by_class[s.label];
        test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(s.take));
        train_idx.insert(train_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(s.take), idx.end());
    }
    std::ranges::sort(train_idx);
    std::ranges::sort(test_idx);
    auto train = dataset.subset(train_idx);
    auto test = dataset.subset(test_idx);
    train.name = dataset.name + "-train";
    test.name = dataset.name + "-test";
    return {std::move(train), std::move(test)};
}

}  // namespace advfront
