#include "ldgen/captions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ldgen/errors.hpp"

namespace ldgen {

namespace {

using nlohmann::json;

constexpr const char *kPlaceholder = "{caption}";

int placeholder_count(const std::string &body) {
  int count = 0;
  std::size_t pos = 0;
  while ((pos = body.find(kPlaceholder, pos)) != std::string::npos) {
    ++count;
    pos += std::strlen(kPlaceholder);
  }
  return count;
}

std::size_t word_count(const std::string &s) {
  std::istringstream is(s);
  std::string tok;
  std::size_t n = 0;
  while (is >> tok) ++n;
  return n;
}

}  // namespace

void InstructionTemplate::validate() const {
  if (id.empty()) throw SchemaError("template: empty id");
  const int n = placeholder_count(body);
  if (n != 1) {
    throw SchemaError("template '" + id + "': expected exactly one " +
                      kPlaceholder + " placeholder, found " +
                      std::to_string(n));
  }
}

std::vector<CaptionRecord> load_caption_corpus(
    const std::string &path, std::vector<std::string> *warnings) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<CaptionRecord> records;
  std::map<std::string, std::size_t> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw SchemaError("corpus line " + std::to_string(line_no) +
                        ": parse error: " + e.what());
    }
    CaptionRecord rec;
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
      throw SchemaError("corpus line " + std::to_string(line_no) +
                        ": missing string field 'id'");
    }
    rec.id = j["id"].get<std::string>();
    if (j.contains("language")) {
      if (!j["language"].is_string()) {
        throw SchemaError("corpus line " + std::to_string(line_no) +
                          ": 'language' must be a string (record '" + rec.id +
                          "')");
      }
      rec.language = j["language"].get<std::string>();
    }
    if (!j.contains("levels") || !j["levels"].is_array() ||
        j["levels"].size() != kCaptionLevels) {
      const std::string got =
          j.contains("levels") && j["levels"].is_array()
              ? std::to_string(j["levels"].size())
              : "none";
      throw SchemaError("corpus line " + std::to_string(line_no) +
                        ": record '" + rec.id + "' needs exactly " +
                        std::to_string(kCaptionLevels) + " levels, got " +
                        got);
    }
    for (int i = 0; i < kCaptionLevels; ++i) {
      const auto &lv = j["levels"][i];
      if (!lv.is_string() || lv.get<std::string>().empty()) {
        throw SchemaError("corpus line " + std::to_string(line_no) +
                          ": record '" + rec.id + "' level " +
                          std::to_string(i) + " must be a non-empty string");
      }
      rec.levels[i] = lv.get<std::string>();
    }
    if (auto it = seen_ids.find(rec.id); it != seen_ids.end()) {
      throw SchemaError("corpus line " + std::to_string(line_no) +
                        ": duplicate id '" + rec.id + "' (first on line " +
                        std::to_string(it->second) + ")");
    }
    seen_ids.emplace(rec.id, line_no);
    if (warnings) {
      for (int i = 1; i < kCaptionLevels; ++i) {
        if (word_count(rec.levels[i]) < word_count(rec.levels[i - 1])) {
          warnings->push_back("record '" + rec.id + "': level " +
                              std::to_string(i) +
                              " has fewer words than level " +
                              std::to_string(i - 1));
          break;
        }
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void save_caption_corpus(const std::string &path,
                         const std::vector<CaptionRecord> &records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto &rec : records) {
    json j;
    j["id"] = rec.id;
    j["language"] = rec.language;
    j["levels"] = rec.levels;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failed for " + path);
}

std::pair<int, std::string> sample_caption_level(const CaptionRecord &record,
                                                 Rng &rng) {
  const int idx = static_cast<int>(rng.below(kCaptionLevels));
  return {idx, record.levels[idx]};
}

std::pair<int, std::string> sample_caption_level_weighted(
    const CaptionRecord &record, const std::array<double, kCaptionLevels> &w,
    Rng &rng) {
  double total = 0.0;
  for (double x : w) {
    if (x < 0.0) throw ConfigError("level weights must be non-negative");
    total += x;
  }
  if (!(total > 0.0)) throw ConfigError("level weights must sum to > 0");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (int i = 0; i < kCaptionLevels; ++i) {
    acc += w[i];
    if (u < acc) return {i, record.levels[i]};
  }
  return {kCaptionLevels - 1, record.levels[kCaptionLevels - 1]};
}

std::string apply_instruction_template(const InstructionTemplate &tmpl,
                                       const std::string &caption) {
  tmpl.validate();
  const std::size_t pos = tmpl.body.find(kPlaceholder);
  std::string out = tmpl.body;
  out.replace(pos, std::strlen(kPlaceholder), caption);
  return out;
}

double proxy_align_score(const std::string &text_a,
                         const std::string &text_b) {
  if (text_a.empty() || text_b.empty()) {
    throw std::invalid_argument("proxy_align_score: empty text");
  }
  auto counts = [](const std::string &s) {
    std::map<std::string, double> c;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) {
      std::transform(tok.begin(), tok.end(), tok.begin(), [](unsigned char ch) {
        return static_cast<char>(std::tolower(ch));
      });
      c[tok] += 1.0;
    }
    return c;
  };
  const auto ca = counts(text_a);
  const auto cb = counts(text_b);
  if (ca.empty() || cb.empty()) {
    throw std::invalid_argument("proxy_align_score: no tokens");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto &[tok, v] : ca) {
    na += v * v;
    if (auto it = cb.find(tok); it != cb.end()) dot += v * it->second;
  }
  for (const auto &[tok, v] : cb) nb += v * v;
  // Single sqrt keeps identical multisets at exactly 1.0.
  return dot / std::sqrt(na * nb);
}

std::vector<InstructionTemplate> default_template_registry() {
  // Bodies are neutral placeholders; real instruction texts are expected to
  // come from a user template file. Identifiers and slot semantics are the
  // stable part of the contract. "no-hi" is the bare passthrough.
  return {
      {"ours", "Rewrite the following image caption so it stays faithful to "
               "the content while naming the key objects and attributes: "
               "{caption}"},
      {"no-hi", "{caption}"},
      {"hi-01", "[hi-01 placeholder instruction] {caption}"},
      {"hi-02", "[hi-02 placeholder instruction] {caption}"},
      {"hi-03", "[hi-03 placeholder instruction] {caption}"},
      {"hi-04", "[hi-04 placeholder instruction] {caption}"},
      {"hi-05", "[hi-05 placeholder instruction] {caption}"},
  };
}

std::vector<InstructionTemplate> load_template_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error &e) {
    throw SchemaError("template file " + path + ": " + e.what());
  }
  if (!j.is_array()) {
    throw SchemaError("template file " + path + ": expected a JSON array");
  }
  std::vector<InstructionTemplate> out;
  for (const auto &item : j) {
    if (!item.is_object() || !item.contains("id") || !item.contains("body") ||
        !item["id"].is_string() || !item["body"].is_string()) {
      throw SchemaError("template file " + path +
                        ": each entry needs string fields 'id' and 'body'");
    }
    InstructionTemplate t{item["id"].get<std::string>(),
                          item["body"].get<std::string>()};
    t.validate();
    out.push_back(std::move(t));
  }
  return out;
}

const InstructionTemplate &find_template(
    const std::vector<InstructionTemplate> &templates, const std::string &id) {
  for (const auto &t : templates) {
    if (t.id == id) return t;
  }
  throw ConfigError("unknown template id '" + id + "'");
}

std::string proxy_report_to_json(const ProxyScoreReport &report) {
  json j;
  j["template_id"] = report.template_id;
  j["level_means"] = report.level_means;
  j["sample_count"] = report.sample_count;
  return j.dump();
}

}  // namespace ldgen
