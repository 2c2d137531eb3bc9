#include "prsim/manifest_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace prsim {

namespace {

[[noreturn]] void bad(std::size_t line, const std::string& what) {
    fail(Errc::ParseError, "line " + std::to_string(line) + ": " + what);
}

struct Line {
    std::size_t no = 0;
    std::string directive;
    std::map<std::string, std::string> kv;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    std::size_t no = 0;
    while (std::getline(in, raw)) {
        ++no;
        std::istringstream ls(raw);
        std::string tok;
        Line line;
        line.no = no;
        while (ls >> tok) {
            if (tok[0] == '#') break;  // comment to end of line
            if (line.directive.empty()) {
                line.directive = tok;
                continue;
            }
            auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0) bad(no, "expected key=value, got '" + tok + "'");
            std::string key = tok.substr(0, eq);
            if (line.kv.count(key)) bad(no, "duplicate key '" + key + "'");
            line.kv[key] = tok.substr(eq + 1);
        }
        if (!line.directive.empty()) out.push_back(std::move(line));
    }
    return out;
}

double num(const Line& line, const std::string& key) {
    auto it = line.kv.find(key);
    if (it == line.kv.end()) bad(line.no, "missing key '" + key + "'");
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        bad(line.no, "key '" + key + "' is not a number");
    }
}

void only_keys(const Line& line, const std::vector<std::string>& allowed) {
    for (const auto& [k, v] : line.kv) {
        bool ok = false;
        for (const std::string& a : allowed)
            if (k == a) ok = true;
        if (!ok) bad(line.no, "unknown key '" + k + "'");
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::ParseError, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

StatementManifest parse_manifest_text(const std::string& text, double w_min) {
    StatementManifest m;
    for (const Line& line : tokenize(text)) {
        StatementItem item;
        if (line.directive == "hypothesis") {
            only_keys(line, {"weight"});
            item.kind = StatementKind::Hypothesis;
            item.weight = num(line, "weight");
        } else if (line.directive == "measurement") {
            only_keys(line, {"weight", "mu", "sigma", "mu_a", "sigma_a"});
            item.kind = StatementKind::Measurement;
            item.weight = num(line, "weight");
            item.prior_mu = num(line, "mu");
            item.prior_sigma = num(line, "sigma");
            item.claimed_mu = num(line, "mu_a");
            item.claimed_sigma = num(line, "sigma_a");
            if (!(item.prior_sigma > 0.0) || !(item.claimed_sigma > 0.0))
                bad(line.no, "sigmas must be positive");
        } else {
            bad(line.no, "unknown directive '" + line.directive + "'");
        }
        m.items.push_back(item);
    }
    try {
        validate_manifest(m, w_min);
    } catch (const Error& e) {
        fail(Errc::ParseError, e.what());
    }
    return m;
}

StatementManifest parse_manifest_file(const std::string& path, double w_min) {
    return parse_manifest_text(slurp(path), w_min);
}

std::vector<NamedBeliefs> parse_beliefs_text(const std::string& text,
                                             const StatementManifest& manifest) {
    std::vector<NamedBeliefs> out;
    NamedBeliefs current;
    bool open = false;
    std::size_t item_idx = 0;
    std::size_t block_line = 0;

    auto close_block = [&]() {
        if (!open) return;
        if (item_idx != manifest.items.size())
            bad(block_line, "reviewer '" + current.name + "' scored " + std::to_string(item_idx) +
                                " of " + std::to_string(manifest.items.size()) + " statements");
        out.push_back(std::move(current));
        current = NamedBeliefs{};
    };

    for (const Line& line : tokenize(text)) {
        if (line.directive == "reviewer") {
            close_block();
            only_keys(line, {"name", "v", "confidence", "read", "understood"});
            open = true;
            block_line = line.no;
            item_idx = 0;
            auto it = line.kv.find("name");
            current.name = it == line.kv.end() ? "reviewer" + std::to_string(out.size() + 1)
                                               : it->second;
            current.beliefs.importance = static_cast<int>(num(line, "v"));
            if (line.kv.count("confidence")) current.confidence = num(line, "confidence");
            if (line.kv.count("read")) current.fraction_read = num(line, "read");
            if (line.kv.count("understood")) current.fraction_understood = num(line, "understood");
            continue;
        }
        if (!open) bad(line.no, "belief line before any 'reviewer' header");
        if (item_idx >= manifest.items.size()) bad(line.no, "more beliefs than statements");
        const StatementItem& item = manifest.items[item_idx];
        BeliefItem b;
        if (line.directive == "hypothesis") {
            if (item.kind != StatementKind::Hypothesis)
                bad(line.no, "statement " + std::to_string(item_idx + 1) + " is a measurement");
            only_keys(line, {"p", "p_a"});
            b.kind = StatementKind::Hypothesis;
            b.p = num(line, "p");
            b.p_after = num(line, "p_a");
        } else if (line.directive == "measurement") {
            if (item.kind != StatementKind::Measurement)
                bad(line.no, "statement " + std::to_string(item_idx + 1) + " is a hypothesis");
            only_keys(line, {"p_acc"});
            b.kind = StatementKind::Measurement;
            b.p_accept = num(line, "p_acc");
        } else {
            bad(line.no, "unknown directive '" + line.directive + "'");
        }
        current.beliefs.items.push_back(b);
        ++item_idx;
    }
    close_block();
    return out;
}

std::vector<NamedBeliefs> parse_beliefs_file(const std::string& path,
                                             const StatementManifest& manifest) {
    return parse_beliefs_text(slurp(path), manifest);
}

}  // namespace prsim
