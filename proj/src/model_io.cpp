#include <fstream>
#include <sstream>

#include <json.hpp>

#include "advfront/error.hpp"
#include "advfront/nnet.hpp"

namespace advfront {

namespace {

constexpr const char* kModelFormat = "advfront-model-v1";

template <typename T>
T require(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) {
        throw ParseError(std::string("model JSON missing key '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model JSON key '") + key + "': " + e.what());
    }
}

}  // namespace

std::string model_to_json(const MlpModel& model) {
    model.validate();
    nlohmann::json j;
    j["format"] = kModelFormat;
    j["classes"] = model.num_classes;
    j["activation"] = "relu";
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : model.layers) {
        j["layers"].push_back({{"in", layer.in()},
                               {"out", layer.out()},
                               {"w", layer.weight.data()},
                               {"b", layer.bias}});
    }
    j["meta"] = model.meta;
    return j.dump(2) + "\n";
}

MlpModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    if (require<std::string>(j, "format") != kModelFormat) {
        throw ParseError("unsupported model format '" + j["format"].get<std::string>() + "'");
    }
    if (require<std::string>(j, "activation") != "relu") {
        throw ParseError("unsupported activation '" + j["activation"].get<std::string>() + "'");
    }
    MlpModel model;
    model.num_classes = require<std::size_t>(j, "classes");
    const auto layers = require<nlohmann::json>(j, "layers");
    if (!layers.is_array()) {
        throw ParseError("model JSON 'layers' is not an array");
    }
    for (const auto& lj : layers) {
        const auto in = require<std::size_t>(lj, "in");
        const auto out = require<std::size_t>(lj, "out");
        auto w = require<std::vector<double>>(lj, "w");
        auto b = require<std::vector<double>>(lj, "b");
        if (w.size() != in * out) {
            throw ShapeError("layer weight length " + std::to_string(w.size()) + " does not equal " +
                             std::to_string(out) + "x" + std::to_string(in));
        }
        model.layers.push_back({Matrix(out, in, std::move(w)), std::move(b)});
    }
    if (j.contains("meta")) {
        for (const auto& [key, value] : j["meta"].items()) {
            model.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    model.validate();
    return model;
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write model file " + path.string());
    }
    out << model_to_json(model);
}

MlpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open model file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

}  // namespace advfront
