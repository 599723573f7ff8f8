#include "tiltlab/data/store.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace tiltlab::data {

using nlohmann::json;

std::string record_id_for(int object_id, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "obj%02d_rec%05d", object_id, index);
    return buf;
}

std::filesystem::path record_dir(const std::filesystem::path& root, int object_id, int index) {
    char obj[16], rec[16];
    std::snprintf(obj, sizeof(obj), "obj%02d", object_id);
    std::snprintf(rec, sizeof(rec), "rec%05d", index);
    return root / "objects" / obj / rec;
}

std::filesystem::path record_dir(const std::filesystem::path& root, const std::string& record_id) {
    // record_id is "objNN_recNNNNN"
    auto sep = record_id.find('_');
    if (sep == std::string::npos) throw std::runtime_error("record_dir: malformed record id " + record_id);
    return root / "objects" / record_id.substr(0, sep) / record_id.substr(sep + 1);
}

void write_record_meta(const std::filesystem::path& dir, const InteractionRecord& r) {
    json j{{"schema", 1},
           {"record_id", r.record_id},
           {"object_id", r.object_id},
           {"action", {{"tilt", {r.action.target_tilt.x, r.action.target_tilt.y}},
                       {"hold_duration", r.action.hold_duration}}},
           {"pre_position", {r.pre_position.x, r.pre_position.y}},
           {"post_position", {r.post_position.x, r.post_position.y}},
           {"impacts",
            {{"count", r.impact_count},
             {"max_normal_speed", r.max_normal_speed ? json(*r.max_normal_speed) : json(nullptr)}}},
           {"probe_record_id", r.probe_record_id},
           {"peak_time", r.peak_time},
           {"episode", r.episode},
           {"action_index", r.action_index},
           {"audio", r.has_audio ? json("audio.wav") : json(nullptr)},
           {"spectrogram", "spec.bin"}};

    std::ofstream f(dir / "meta.json");
    if (!f) throw std::runtime_error("write_record_meta: cannot open " + (dir / "meta.json").string());
    f << j.dump(2) << "\n";
    if (!f) throw std::runtime_error("write_record_meta: write failed in " + dir.string());
}

InteractionRecord read_record_meta(const std::filesystem::path& dir) {
    std::ifstream f(dir / "meta.json");
    if (!f) throw std::runtime_error("read_record_meta: cannot open " + (dir / "meta.json").string());
    json j = json::parse(f);
    if (j.at("schema") != 1) throw std::runtime_error("read_record_meta: unsupported schema in " + dir.string());

    InteractionRecord r;
    r.record_id = j.at("record_id");
    r.object_id = j.at("object_id");
    r.action.target_tilt = {j.at("action").at("tilt")[0], j.at("action").at("tilt")[1]};
    r.action.hold_duration = j.at("action").at("hold_duration");
    r.pre_position = {j.at("pre_position")[0], j.at("pre_position")[1]};
    r.post_position = {j.at("post_position")[0], j.at("post_position")[1]};
    r.impact_count = j.at("impacts").at("count");
    if (!j.at("impacts").at("max_normal_speed").is_null())
        r.max_normal_speed = j.at("impacts").at("max_normal_speed").get<double>();
    r.probe_record_id = j.at("probe_record_id");
    r.peak_time = j.at("peak_time");
    r.episode = j.at("episode");
    r.action_index = j.at("action_index");
    r.has_audio = !j.at("audio").is_null();
    return r;
}

dsp::Spectrogram read_record_spectrogram(const std::filesystem::path& root, const std::string& record_id) {
    return dsp::read_spectrogram(record_dir(root, record_id) / "spec.bin");
}

void write_push_records(const std::filesystem::path& root, const std::vector<PushRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) {
        arr.push_back({{"record_id", r.record_id},
                       {"object_id", r.object_id},
                       {"p_start", {r.p_start.x, r.p_start.y}},
                       {"p_end", {r.p_end.x, r.p_end.y}},
                       {"pre_position", {r.pre_position.x, r.pre_position.y}},
                       {"post_position", {r.post_position.x, r.post_position.y}},
                       {"probe_record_id", r.probe_record_id},
                       {"train", r.train},
                       {"split", r.split}});
    }
    std::filesystem::create_directories(root / "push");
    std::ofstream f(root / "push" / "records.json");
    if (!f) throw std::runtime_error("write_push_records: cannot open push/records.json");
    f << json{{"schema", 1}, {"records", arr}}.dump(2) << "\n";
}

std::vector<PushRecord> read_push_records(const std::filesystem::path& root) {
    std::ifstream f(root / "push" / "records.json");
    if (!f) throw std::runtime_error("read_push_records: cannot open push/records.json under " + root.string());
    json j = json::parse(f);
    std::vector<PushRecord> out;
    for (const auto& e : j.at("records")) {
        PushRecord r;
        r.record_id = e.at("record_id");
        r.object_id = e.at("object_id");
        r.p_start = {e.at("p_start")[0], e.at("p_start")[1]};
        r.p_end = {e.at("p_end")[0], e.at("p_end")[1]};
        r.pre_position = {e.at("pre_position")[0], e.at("pre_position")[1]};
        r.post_position = {e.at("post_position")[0], e.at("post_position")[1]};
        r.probe_record_id = e.at("probe_record_id");
        r.train = e.at("train");
        r.split = e.value("split", "main");
        out.push_back(r);
    }
    return out;
}

}  // namespace tiltlab::data
