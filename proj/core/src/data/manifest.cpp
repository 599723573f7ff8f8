#include "tiltlab/data/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "tiltlab/rng.hpp"

namespace tiltlab::data {

using nlohmann::json;

bool Manifest::in_set_a(int object_id) const {
    return std::binary_search(set_a.begin(), set_a.end(), object_id);
}

const ManifestRecord* Manifest::find_record(const std::string& record_id) const {
    auto it = std::lower_bound(records.begin(), records.end(), record_id,
                               [](const ManifestRecord& r, const std::string& id) { return r.record_id < id; });
    if (it != records.end() && it->record_id == record_id) return &*it;
    return nullptr;
}

std::pair<std::vector<int>, std::vector<int>> assign_object_sets(int n_objects, uint64_t seed) {
    std::vector<int> ids(n_objects);
    for (int i = 0; i < n_objects; ++i) ids[i] = i;
    Rng rng(seed_combine(seed, "object_sets"));
    rng.shuffle(ids);
    std::vector<int> a(ids.begin(), ids.begin() + n_objects / 2);
    std::vector<int> b(ids.begin() + n_objects / 2, ids.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return {a, b};
}

Manifest make_splits(Manifest manifest, uint64_t seed) {
    std::sort(manifest.records.begin(), manifest.records.end(),
              [](const ManifestRecord& x, const ManifestRecord& y) { return x.record_id < y.record_id; });
    auto [a, b] = assign_object_sets(static_cast<int>(manifest.objects.size()), seed);
    manifest.set_a = a;
    manifest.set_b = b;

    std::map<int, std::vector<ManifestRecord*>> by_object;
    for (auto& rec : manifest.records) by_object[rec.object_id].push_back(&rec);

    for (auto& [object_id, recs] : by_object) {
        std::sort(recs.begin(), recs.end(),
                  [](const ManifestRecord* x, const ManifestRecord* y) { return x->record_id < y->record_id; });
        std::vector<size_t> order(recs.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(seed_combine(seed_combine(seed, "record_split"), static_cast<uint64_t>(object_id)));
        rng.shuffle(order);
        size_t n_main = (recs.size() * 8 + 5) / 10;  // 80%, round to nearest
        bool in_a = manifest.in_set_a(object_id);
        for (size_t i = 0; i < order.size(); ++i) {
            bool main = i < n_main;
            recs[order[i]]->split = main ? "main" : "holdout";
            recs[order[i]]->train = main && in_a;
        }
    }
    return manifest;
}

namespace {

json tray_to_json(const sim::TrayConfig& t) {
    return json{{"side_length", t.side_length},
                {"gravity", t.gravity},
                {"max_tilt", t.max_tilt},
                {"tilt_slew_rate", t.tilt_slew_rate},
                {"sim_dt", t.sim_dt}};
}

sim::TrayConfig tray_from_json(const json& j) {
    sim::TrayConfig t;
    t.side_length = j.at("side_length");
    t.gravity = j.at("gravity");
    t.max_tilt = j.at("max_tilt");
    t.tilt_slew_rate = j.at("tilt_slew_rate");
    t.sim_dt = j.at("sim_dt");
    return t;
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
    json objects = json::array();
    for (const auto& o : m.objects) {
        objects.push_back({{"id", o.physics.object_id},
                           {"mass", o.physics.mass},
                           {"radius", o.physics.radius},
                           {"friction_mu", o.physics.friction_mu},
                           {"restitution", o.physics.restitution},
                           {"mode_count", o.mode_count},
                           {"fundamental_hz", o.fundamental_hz},
                           {"mean_damping", o.mean_damping},
                           {"external", o.external}});
    }
    json records = json::array();
    for (const auto& r : m.records) {
        records.push_back({{"record_id", r.record_id},
                           {"object_id", r.object_id},
                           {"split", r.split},
                           {"train", r.train},
                           {"path", r.path}});
    }
    json j{{"schema", m.schema},
           {"dataset_seed", m.dataset_seed},
           {"tray", tray_to_json(m.tray)},
           {"objects", objects},
           {"set_a", m.set_a},
           {"set_b", m.set_b},
           {"records", records},
           {"rerolls", m.rerolls},
           {"push_train_objects", m.push_train_objects},
           {"push_test_objects", m.push_test_objects}};

    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_manifest: cannot open " + path.string());
    f << j.dump(2) << "\n";
    if (!f) throw std::runtime_error("write_manifest: write failed for " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_manifest: cannot open " + path.string());
    json j = json::parse(f);

    Manifest m;
    m.schema = j.at("schema");
    if (m.schema != 1) throw std::runtime_error("read_manifest: unsupported schema in " + path.string());
    m.dataset_seed = j.at("dataset_seed");
    m.tray = tray_from_json(j.at("tray"));
    for (const auto& o : j.at("objects")) {
        ObjectEntry e;
        e.physics.object_id = o.at("id");
        e.physics.mass = o.at("mass");
        e.physics.radius = o.at("radius");
        e.physics.friction_mu = o.at("friction_mu");
        e.physics.restitution = o.at("restitution");
        e.mode_count = o.at("mode_count");
        e.fundamental_hz = o.at("fundamental_hz");
        e.mean_damping = o.at("mean_damping");
        e.external = o.value("external", false);
        m.objects.push_back(e);
    }
    m.set_a = j.at("set_a").get<std::vector<int>>();
    m.set_b = j.at("set_b").get<std::vector<int>>();
    for (const auto& r : j.at("records")) {
        ManifestRecord rec;
        rec.record_id = r.at("record_id");
        rec.object_id = r.at("object_id");
        rec.split = r.at("split");
        rec.train = r.at("train");
        rec.path = r.at("path");
        m.records.push_back(rec);
    }
    m.rerolls = j.at("rerolls");
    m.push_train_objects = j.at("push_train_objects").get<std::vector<int>>();
    m.push_test_objects = j.at("push_test_objects").get<std::vector<int>>();

    std::sort(m.records.begin(), m.records.end(),
              [](const ManifestRecord& x, const ManifestRecord& y) { return x.record_id < y.record_id; });
    for (const auto& rec : m.records) {
        if (rec.object_id < 0 || rec.object_id >= static_cast<int>(m.objects.size()))
            throw std::runtime_error("read_manifest: record references unknown object id " +
                                     std::to_string(rec.object_id));
    }
    return m;
}

}  // namespace tiltlab::data
