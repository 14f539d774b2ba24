#include "omlab/core/checkpoint.hpp"

#include <fstream>

#include "omlab/core/error.hpp"

namespace omlab::core::ckpt {

using nlohmann::json;

json params_to_json(const NamedParams& params) {
    json out = json::object();
    for (const auto& [name, p] : params) {
        require(!out.contains(name), "checkpoint: duplicate param name '" + name + "'");
        out[name] = {{"shape", p.shape()}, {"values", p.values()}};
    }
    return out;
}

void params_from_json(const json& j, const NamedParams& params) {
    for (const auto& [name, p] : params) {
        require(j.contains(name), "checkpoint: missing param '" + name + "'");
        const auto& entry = j.at(name);
        auto shape = entry.at("shape").get<std::vector<int>>();
        require(shape == p.shape(), "checkpoint: shape mismatch for '" + name + "'");
        auto values = entry.at("values").get<std::vector<double>>();
        require(values.size() == p.size(), "checkpoint: value count mismatch for '" + name + "'");
        p.node()->values = std::move(values);
    }
}

json adam_to_json(const Adam& opt) {
    json slots = json::array();
    for (const auto& s : opt.slots()) slots.push_back({{"m", s.m}, {"v", s.v}});
    return {{"t", opt.steps()}, {"slots", slots}};
}

void adam_from_json(const json& j, Adam& opt) {
    std::vector<Adam::Slot> slots;
    for (const auto& s : j.at("slots")) {
        slots.push_back({s.at("m").get<std::vector<double>>(),
                         s.at("v").get<std::vector<double>>()});
    }
    opt.restore(std::move(slots), j.at("t").get<int64_t>());
}

json make_bundle(const NamedParams& params) {
    return {{"format", kFormat}, {"params", params_to_json(params)}};
}

void load_bundle(const json& bundle, const NamedParams& params) {
    require(bundle.value("format", "") == kFormat, "checkpoint: unknown format");
    params_from_json(bundle.at("params"), params);
}

void write_file(const std::string& path, const json& j) {
    std::ofstream f(path);
    require(f.good(), "checkpoint: cannot open '" + path + "' for writing");
    f << j.dump();
    f.flush();
    require(f.good(), "checkpoint: write to '" + path + "' failed");
}

json read_file(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "checkpoint: cannot open '" + path + "'");
    return json::parse(f);
}

}  // namespace omlab::core::ckpt
