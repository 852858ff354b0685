#include "apimig/catalog.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "apimig/text.hpp"

namespace apimig {

namespace fs = std::filesystem;

std::string rule_file_text(const Rule& r) {
  nlohmann::ordered_json prov;
  prov["pr"] = r.provenance.pr_id;
  prov["pr_url"] = r.provenance.pr_url;
  prov["stages"] = r.provenance.stages;
  prov["example_ids"] = r.provenance.example_ids;
  prov["before"] = r.provenance.before_text;
  prov["after"] = r.provenance.after_text;
  if (!r.provenance.warnings.empty()) prov["warnings"] = r.provenance.warnings;
  return print_rule(r) + "# provenance: " + prov.dump() + "\n";
}

Rule parse_rule_file_text(std::string_view text) {
  Rule r = parse_rule(text);
  size_t pos = 0;
  const std::string key = "# provenance:";
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
    if (line.rfind(key, 0) == 0) {
      auto payload = line.substr(key.size());
      try {
        auto j = nlohmann::json::parse(payload);
        r.provenance.pr_id = j.value("pr", "");
        r.provenance.pr_url = j.value("pr_url", "");
        if (j.contains("stages"))
          r.provenance.stages = j["stages"].get<std::vector<std::string>>();
        if (j.contains("example_ids"))
          r.provenance.example_ids = j["example_ids"].get<std::vector<std::string>>();
        r.provenance.before_text = j.value("before", "");
        r.provenance.after_text = j.value("after", "");
        if (j.contains("warnings"))
          r.provenance.warnings = j["warnings"].get<std::vector<std::string>>();
      } catch (const nlohmann::json::exception&) {
        // free-text provenance, keep defaults
      }
      break;
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return r;
}

std::vector<Rule> load_catalog(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".rule")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<Rule> rules;
  for (const auto& f : files) {
    Rule r = parse_rule_file_text(read_file(f.string()));
    r.id = f.stem().string();
    rules.push_back(std::move(r));
  }
  return rules;
}

void save_catalog(const std::string& dir, std::vector<Rule>& rules, const FilterReport* report) {
  fs::create_directories(dir);
  nlohmann::ordered_json index;
  for (size_t i = 0; i < rules.size(); ++i) {
    Rule& r = rules[i];
    if (r.id.empty()) {
      std::ostringstream id;
      id << "rule_" << std::setw(3) << std::setfill('0') << i;
      r.id = id.str();
    }
    std::string file = r.id + ".rule";
    write_file((fs::path(dir) / file).string(), rule_file_text(r));
    nlohmann::ordered_json entry;
    entry["file"] = file;
    entry["pr_url"] = r.provenance.pr_url;
    entry["stage"] = r.provenance.stage_string();
    entry["example_ids"] = r.provenance.example_ids;
    index[r.id] = entry;
  }
  if (report) {
    nlohmann::ordered_json rejected = nlohmann::ordered_json::array();
    for (const auto& [rule, reason] : report->rejected) {
      nlohmann::ordered_json entry;
      entry["match"] = print_template(rule.match);
      entry["rewrite"] = print_template(rule.rewrite);
      entry["reason"] = reject_reason_name(reason);
      entry["pr"] = rule.provenance.pr_id;
      rejected.push_back(entry);
    }
    index["rejected"] = rejected;
  }
  write_file((fs::path(dir) / "index.json").string(), index.dump(2) + "\n");
}

}  // namespace apimig
