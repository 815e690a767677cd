#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ldgen/rng.hpp"

namespace ldgen {

inline constexpr int kCaptionLevels = 6;

// Six captions of one image ordered simple -> detailed.
struct CaptionRecord {
  std::string id;
  std::string language = "en";
  std::array<std::string, kCaptionLevels> levels;
};

// Prompt wrapper with exactly one {caption} placeholder. The stock registry
// ships the identifiers ours / no-hi / hi-01..hi-05 with neutral bodies;
// production bodies are loaded from a template file.
struct InstructionTemplate {
  std::string id;
  std::string body;

  void validate() const;  // throws SchemaError unless exactly one placeholder
};

struct ProxyScoreReport {
  std::string template_id;
  std::array<double, kCaptionLevels> level_means{};
  std::uint64_t sample_count = 0;
};

// Line-delimited JSON corpus: {"id": ..., "language": ..., "levels": [6]}.
// Malformed lines throw SchemaError naming the line; a record whose level
// word counts are not non-decreasing appends a lint note to `warnings`.
std::vector<CaptionRecord> load_caption_corpus(
    const std::string &path, std::vector<std::string> *warnings = nullptr);
void save_caption_corpus(const std::string &path,
                         const std::vector<CaptionRecord> &records);

// Uniform draw over the six levels.
std::pair<int, std::string> sample_caption_level(const CaptionRecord &record,
                                                 Rng &rng);
// Draw with caller-supplied non-negative weights (sum > 0).
std::pair<int, std::string> sample_caption_level_weighted(
    const CaptionRecord &record, const std::array<double, kCaptionLevels> &w,
    Rng &rng);

// Substitutes the placeholder exactly once; "no-hi" style bodies (the bare
// placeholder) return the caption verbatim.
std::string apply_instruction_template(const InstructionTemplate &tmpl,
                                       const std::string &caption);

// Cosine of lowercased whitespace-token count vectors, in [0, 1]. A proxy
// used only for relative comparisons in reports and tests; not comparable
// to any embedding-based score.
double proxy_align_score(const std::string &text_a, const std::string &text_b);

// Stock registry (placeholder bodies) and template-file IO
// (JSON array of {"id", "body"}).
std::vector<InstructionTemplate> default_template_registry();
std::vector<InstructionTemplate> load_template_file(const std::string &path);
const InstructionTemplate &find_template(
    const std::vector<InstructionTemplate> &templates, const std::string &id);

std::string proxy_report_to_json(const ProxyScoreReport &report);

}  // namespace ldgen
