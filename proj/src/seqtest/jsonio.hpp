#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "seqtest/design.hpp"
#include "seqtest/models.hpp"
#include "seqtest/simulate.hpp"

namespace seqtest {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Model description, e.g.
//   {"kind":"multichannel","channels":[{"family":"exponential","theta":0.5}]}
// Unknown kinds or families are config errors; extra fields are ignored.
ModelSuite model_from_json(const std::string& text);
std::string model_to_json(const ModelSuite& suite);

// Design description: {"logA":..,"logB":..,"q0":[..],"q1":[..],"p":[..]};
// "p" is optional on input (empty when absent).
Design design_from_json(const std::string& text);
std::string design_to_json(const Design& d);

std::string sim_report_to_json(const SimReport& r);

uint64_t fnv1a64(std::string_view s);

// "# artifact_version=<v> config_hash=<16 hex digits>" over the given
// canonical config string.
std::string metadata_comment(std::string_view config_string);

// Shortest representation that round-trips a double; "nan" for NaN.
std::string fmt_double(double v);

// Minimal CSV assembler: metadata comment line, header row, data rows.
class Csv {
  public:
    explicit Csv(std::vector<std::string> header);
    void add_row(std::vector<std::string> cells);
    std::string str(std::string_view config_string) const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace seqtest
