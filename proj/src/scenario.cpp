#include "prsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace prsim {

using nlohmann::json;

namespace {

// Shortest representation that parses back to the same double.
std::string fmt_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace

std::string Strategy::label() const {
    switch (kind) {
        case StrategyKind::AlwaysA: return "always_a";
        case StrategyKind::AlwaysB: return "always_b";
        case StrategyKind::AlwaysC: return "always_c";
        case StrategyKind::AlwaysD: return "always_d";
        case StrategyKind::HonestReviewer: return "honest_reviewer";
        case StrategyKind::NoisyReviewer:
            return "noisy_reviewer:" + fmt_double(noise);
        case StrategyKind::Informed: {
            std::string out = "informed:" + fmt_double(f_bad);
            if (false_positive > 0.0) out += "," + fmt_double(false_positive);
            return out;
        }
        case StrategyKind::Mixture:
            return "mixture:" + fmt_double(mix[0]) + "," + fmt_double(mix[1]) + "," +
                   fmt_double(mix[2]) + "," + fmt_double(mix[3]);
    }
    return "?";
}

Strategy Strategy::parse(const std::string& spec) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                args.push_back(std::stod(tok));
            } catch (...) {
                fail(Errc::ConfigInvalid, "bad strategy argument in '" + spec + "'");
            }
        }
    }
    Strategy s;
    auto want = [&](std::size_t lo, std::size_t hi) {
        if (args.size() < lo || args.size() > hi)
            fail(Errc::ConfigInvalid, "wrong argument count in strategy '" + spec + "'");
    };
    if (head == "always_a") {
        want(0, 0);
        s.kind = StrategyKind::AlwaysA;
    } else if (head == "always_b") {
        want(0, 0);
        s.kind = StrategyKind::AlwaysB;
    } else if (head == "always_c") {
        want(0, 0);
        s.kind = StrategyKind::AlwaysC;
    } else if (head == "always_d") {
        want(0, 0);
        s.kind = StrategyKind::AlwaysD;
    } else if (head == "honest_reviewer") {
        want(0, 0);
        s.kind = StrategyKind::HonestReviewer;
    } else if (head == "noisy_reviewer") {
        want(1, 1);
        s.kind = StrategyKind::NoisyReviewer;
        s.noise = args[0];
        if (!(s.noise >= 0.0)) fail(Errc::ConfigInvalid, "noise must be non-negative");
    } else if (head == "informed") {
        want(1, 2);
        s.kind = StrategyKind::Informed;
        s.f_bad = args[0];
        s.false_positive = args.size() > 1 ? args[1] : 0.0;
        if (!(s.f_bad >= 0.0 && s.f_bad <= 1.0) ||
            !(s.false_positive >= 0.0 && s.false_positive <= 1.0))
            fail(Errc::ConfigInvalid, "informed rates must be in [0,1]");
    } else if (head == "mixture") {
        want(4, 4);
        s.kind = StrategyKind::Mixture;
        double sum = 0.0;
        for (int i = 0; i < 4; ++i) {
            s.mix[i] = args[i];
            if (s.mix[i] < 0.0) fail(Errc::ConfigInvalid, "mixture weights must be non-negative");
            sum += s.mix[i];
        }
        if (std::abs(sum - 1.0) > 1e-9) fail(Errc::ConfigInvalid, "mixture weights must sum to 1");
    } else {
        fail(Errc::ConfigInvalid, "unknown strategy '" + spec + "'");
    }
    return s;
}

void ScenarioConfig::validate() const {
    params.validate();
    if (n_submissions < 0 || n_accounts < 0) fail(Errc::ConfigInvalid, "negative population");
    if (!(f_rej > 0.0 && f_rej < 1.0) || !(f_acc > 0.0 && f_acc < 1.0) || f_rej + f_acc > 1.0)
        fail(Errc::ConfigInvalid, "ground-truth rates must satisfy f_rej + f_acc <= 1");
    double sum = 0.0;
    for (const auto& [s, frac] : strategy_mix) {
        if (frac < 0.0) fail(Errc::ConfigInvalid, "negative strategy fraction");
        sum += frac;
    }
    if (!strategy_mix.empty() && std::abs(sum - 1.0) > 1e-9)
        fail(Errc::ConfigInvalid, "strategy fractions must sum to 1");
    if (n_accounts > 0 && strategy_mix.empty())
        fail(Errc::ConfigInvalid, "accounts configured but no strategies");
    if (rounds_cap < 1) fail(Errc::ConfigInvalid, "rounds_cap must be >= 1");
    if (!(arrivals_per_day > 0.0)) fail(Errc::ConfigInvalid, "arrival rate must be positive");
    if (vote_window_days < 0.0 || vote_window_days > params.t_max)
        fail(Errc::ConfigInvalid, "vote window must lie within [0, t_max]");
    for (double p : {iteration_round_prob, late_report_prob, voucher_payout_prob})
        if (p < 0.0 || p > 1.0) fail(Errc::ConfigInvalid, "probabilities must be in [0,1]");
    if (reviewer_noise < 0.0) fail(Errc::ConfigInvalid, "reviewer noise must be non-negative");
    if (initial_treasury < 0 || author_funds < 0) fail(Errc::ConfigInvalid, "negative funding");
    if (auction_revenue && !(auction_median > 0.0 && auction_sigma >= 0.0))
        fail(Errc::ConfigInvalid, "auction distribution needs positive median");
}

std::vector<int> ScenarioConfig::agents_per_strategy() const {
    std::vector<int> counts(strategy_mix.size(), 0);
    if (n_accounts == 0 || strategy_mix.empty()) return counts;
    std::vector<std::pair<double, std::size_t>> remainders;
    int assigned = 0;
    for (std::size_t i = 0; i < strategy_mix.size(); ++i) {
        double exact = strategy_mix[i].second * n_accounts;
        counts[i] = static_cast<int>(std::floor(exact));
        assigned += counts[i];
        remainders.push_back({exact - std::floor(exact), i});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    for (int k = 0; k < n_accounts - assigned; ++k) counts[remainders[k % remainders.size()].second]++;
    return counts;
}

namespace {

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            fail(Errc::ConfigInvalid, where + ": unknown key '" + it.key() + "'");
    }
}

Milli money(const json& j) { return static_cast<Milli>(std::llround(j.get<double>() * kMilliPerUnit)); }

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::ConfigInvalid, std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(Errc::ConfigInvalid, "scenario must be a JSON object");
    check_keys(j,
               {"name", "seed", "n_accounts", "n_submissions", "ground_truth", "strategy_mix",
                "params", "rounds_cap", "iteration_round_prob", "arrivals_per_day",
                "vote_window_days", "reviewer_noise", "late_report_prob", "voucher_payout_prob",
                "initial_treasury", "author_funds", "persist_log", "record_history",
                "auction_revenue"},
               "scenario");

    ScenarioConfig cfg;
    if (j.contains("name")) cfg.name = j["name"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n_accounts")) cfg.n_accounts = j["n_accounts"].get<int>();
    if (j.contains("n_submissions")) cfg.n_submissions = j["n_submissions"].get<int>();
    if (j.contains("ground_truth")) {
        const json& g = j["ground_truth"];
        check_keys(g, {"f_rej", "f_acc"}, "ground_truth");
        if (g.contains("f_rej")) cfg.f_rej = g["f_rej"].get<double>();
        if (g.contains("f_acc")) cfg.f_acc = g["f_acc"].get<double>();
    }
    if (j.contains("strategy_mix")) {
        for (auto it = j["strategy_mix"].begin(); it != j["strategy_mix"].end(); ++it)
            cfg.strategy_mix.push_back({Strategy::parse(it.key()), it.value().get<double>()});
    }
    if (j.contains("params")) {
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
            set_param(cfg.params, it.key(), it.value().get<double>());
    }
    if (j.contains("rounds_cap")) cfg.rounds_cap = j["rounds_cap"].get<int>();
    if (j.contains("iteration_round_prob"))
        cfg.iteration_round_prob = j["iteration_round_prob"].get<double>();
    if (j.contains("arrivals_per_day")) cfg.arrivals_per_day = j["arrivals_per_day"].get<double>();
    if (j.contains("vote_window_days")) cfg.vote_window_days = j["vote_window_days"].get<double>();
    if (j.contains("reviewer_noise")) cfg.reviewer_noise = j["reviewer_noise"].get<double>();
    if (j.contains("late_report_prob")) cfg.late_report_prob = j["late_report_prob"].get<double>();
    if (j.contains("voucher_payout_prob"))
        cfg.voucher_payout_prob = j["voucher_payout_prob"].get<double>();
    if (j.contains("initial_treasury")) cfg.initial_treasury = money(j["initial_treasury"]);
    if (j.contains("author_funds")) cfg.author_funds = money(j["author_funds"]);
    if (j.contains("persist_log")) cfg.persist_log = j["persist_log"].get<bool>();
    if (j.contains("record_history")) cfg.record_history = j["record_history"].get<bool>();
    if (j.contains("auction_revenue")) {
        const json& a = j["auction_revenue"];
        check_keys(a, {"enabled", "median", "sigma"}, "auction_revenue");
        if (a.contains("enabled")) cfg.auction_revenue = a["enabled"].get<bool>();
        if (a.contains("median")) cfg.auction_median = a["median"].get<double>();
        if (a.contains("sigma")) cfg.auction_sigma = a["sigma"].get<double>();
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::ConfigInvalid, "cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ScenarioConfig::to_json_text() const {
    json j;
    j["name"] = name;
    j["seed"] = seed;
    j["n_accounts"] = n_accounts;
    j["n_submissions"] = n_submissions;
    j["ground_truth"] = {{"f_rej", f_rej}, {"f_acc", f_acc}};
    json mix;
    for (const auto& [s, frac] : strategy_mix) mix[s.label()] = frac;
    j["strategy_mix"] = std::move(mix);
    j["rounds_cap"] = rounds_cap;
    j["iteration_round_prob"] = iteration_round_prob;
    j["arrivals_per_day"] = arrivals_per_day;
    j["vote_window_days"] = vote_window_days;
    j["reviewer_noise"] = reviewer_noise;
    j["late_report_prob"] = late_report_prob;
    j["voucher_payout_prob"] = voucher_payout_prob;
    j["initial_treasury"] = double(initial_treasury) / kMilliPerUnit;
    j["author_funds"] = double(author_funds) / kMilliPerUnit;
    j["persist_log"] = persist_log;
    j["record_history"] = record_history;
    j["auction_revenue"] = {{"enabled", auction_revenue}, {"median", auction_median},
                            {"sigma", auction_sigma}};
    return j.dump(2);
}

}  // namespace prsim
