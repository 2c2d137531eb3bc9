#pragma once

#include <string>
#include <vector>

#include "prsim/review.hpp"
#include "prsim/scoring.hpp"

namespace prsim {

// Plain-text statement manifests and reviewer belief sheets. Line-oriented,
// strict: unknown directives or keys raise a ParseError naming the line.
//
//   # manifest
//   hypothesis weight=0.6
//   measurement weight=0.4 mu=1.2 sigma=0.5 mu_a=1.05 sigma_a=0.2
//
//   # beliefs (one block per reviewer, items in manifest order)
//   reviewer name=alice v=3 confidence=0.9 read=1.0 understood=0.8
//   hypothesis p=0.5 p_a=0.9
//   measurement p_acc=0.8

StatementManifest parse_manifest_text(const std::string& text, double w_min);
StatementManifest parse_manifest_file(const std::string& path, double w_min);

struct NamedBeliefs {
    std::string name;
    ReviewerBeliefs beliefs;
    double confidence = 1.0;
    double fraction_read = 1.0;
    double fraction_understood = 1.0;
};

std::vector<NamedBeliefs> parse_beliefs_text(const std::string& text,
                                             const StatementManifest& manifest);
std::vector<NamedBeliefs> parse_beliefs_file(const std::string& path,
                                             const StatementManifest& manifest);

}  // namespace prsim
