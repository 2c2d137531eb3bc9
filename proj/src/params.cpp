#include "prsim/params.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <vector>

namespace prsim {

void ProtocolParams::validate() const {
    auto req = [](bool ok, const char* what) {
        if (!ok) fail(Errc::ConfigInvalid, what);
    };
    req(t_vote > 0 && t_max > t_vote, "need 0 < t_vote < t_max");
    req(n_votes >= 1, "n_votes >= 1");
    req(n_reviews >= 1, "n_reviews >= 1");
    req(alpha_select >= 0, "alpha_select >= 0");
    req(selection_rep_floor > 0, "selection_rep_floor > 0");
    req(review_due_days > 0 && replace_window_days > 0, "review windows > 0");
    req(delay_factor_floor > 0 && delay_factor_floor <= 1, "delay floor in (0,1]");
    req(min_conclusion_len >= 0, "min_conclusion_len >= 0");
    req(w_min > 0 && w_min <= 1, "w_min in (0,1]");
    req(k_decay_per_year > 0, "k_decay_per_year > 0");
    req(rating_vote_threshold >= 1, "rating_vote_threshold >= 1");
    req(rating_clamp < 0, "rating_clamp < 0");
    req(rec_reward > 0 && rec_horizon_years > 0, "recommendation params > 0");
    req(alpha_stake > 0, "alpha_stake > 0");
    req(t_stake_years >= 0, "t_stake_years >= 0");
    req(petition_quorum >= 0 && petition_quorum <= 1, "quorum in [0,1]");
    req(petition_majority >= 0 && petition_majority < 1, "majority in [0,1)");
    req(epoch_days > 0, "epoch_days > 0");
    req(x_fee >= 0 && delta >= 0 && fee_min >= 0, "fees non-negative");
    req(0 <= d && d <= d_r && d_r <= x_fee, "need 0 <= d <= d_R <= x");
    req(margin_b > 1 && margin_d > 1, "margins must exceed 1");
    req(voucher_grant_floor > 0 && voucher_grant_floor <= 1, "voucher grant floor in (0,1]");
}

namespace {

struct ParamField {
    std::function<double(const ProtocolParams&)> get;
    std::function<void(ProtocolParams&, double)> set;
};

Milli to_milli(double v) { return static_cast<Milli>(std::llround(v * kMilliPerUnit)); }

const std::map<std::string, ParamField>& param_table() {
    static const std::map<std::string, ParamField> table = {
        {"t_vote", {[](const ProtocolParams& p) { return p.t_vote; },
                    [](ProtocolParams& p, double v) { p.t_vote = v; }}},
        {"t_max", {[](const ProtocolParams& p) { return p.t_max; },
                   [](ProtocolParams& p, double v) { p.t_max = v; }}},
        {"n_votes", {[](const ProtocolParams& p) { return double(p.n_votes); },
                     [](ProtocolParams& p, double v) { p.n_votes = int(std::llround(v)); }}},
        {"n_reviews", {[](const ProtocolParams& p) { return double(p.n_reviews); },
                       [](ProtocolParams& p, double v) { p.n_reviews = int(std::llround(v)); }}},
        {"alpha_select", {[](const ProtocolParams& p) { return p.alpha_select; },
                          [](ProtocolParams& p, double v) { p.alpha_select = v; }}},
        {"selection_rep_floor", {[](const ProtocolParams& p) { return p.selection_rep_floor; },
                                 [](ProtocolParams& p, double v) { p.selection_rep_floor = v; }}},
        {"review_due_days", {[](const ProtocolParams& p) { return p.review_due_days; },
                             [](ProtocolParams& p, double v) { p.review_due_days = v; }}},
        {"replace_window_days", {[](const ProtocolParams& p) { return p.replace_window_days; },
                                 [](ProtocolParams& p, double v) { p.replace_window_days = v; }}},
        {"delay_factor_floor", {[](const ProtocolParams& p) { return p.delay_factor_floor; },
                                [](ProtocolParams& p, double v) { p.delay_factor_floor = v; }}},
        {"min_conclusion_len", {[](const ProtocolParams& p) { return double(p.min_conclusion_len); },
                                [](ProtocolParams& p, double v) { p.min_conclusion_len = int(std::llround(v)); }}},
        {"w_min", {[](const ProtocolParams& p) { return p.w_min; },
                   [](ProtocolParams& p, double v) { p.w_min = v; }}},
        {"accept_threshold", {[](const ProtocolParams& p) { return p.accept_threshold; },
                              [](ProtocolParams& p, double v) { p.accept_threshold = v; }}},
        {"k_decay_per_year", {[](const ProtocolParams& p) { return p.k_decay_per_year; },
                              [](ProtocolParams& p, double v) { p.k_decay_per_year = v; }}},
        {"r_min", {[](const ProtocolParams& p) { return p.r_min; },
                   [](ProtocolParams& p, double v) { p.r_min = v; }}},
        {"rating_vote_threshold", {[](const ProtocolParams& p) { return double(p.rating_vote_threshold); },
                                   [](ProtocolParams& p, double v) { p.rating_vote_threshold = int(std::llround(v)); }}},
        {"rating_clamp", {[](const ProtocolParams& p) { return p.rating_clamp; },
                          [](ProtocolParams& p, double v) { p.rating_clamp = v; }}},
        {"rating_expiry_years", {[](const ProtocolParams& p) { return p.rating_expiry_years; },
                                 [](ProtocolParams& p, double v) { p.rating_expiry_years = v; }}},
        {"rec_reward", {[](const ProtocolParams& p) { return p.rec_reward; },
                        [](ProtocolParams& p, double v) { p.rec_reward = v; }}},
        {"rec_horizon_years", {[](const ProtocolParams& p) { return p.rec_horizon_years; },
                               [](ProtocolParams& p, double v) { p.rec_horizon_years = v; }}},
        {"rec_min_rep", {[](const ProtocolParams& p) { return p.rec_min_rep; },
                         [](ProtocolParams& p, double v) { p.rec_min_rep = v; }}},
        {"alpha_stake", {[](const ProtocolParams& p) { return p.alpha_stake; },
                         [](ProtocolParams& p, double v) { p.alpha_stake = v; }}},
        {"t_stake_years", {[](const ProtocolParams& p) { return p.t_stake_years; },
                           [](ProtocolParams& p, double v) { p.t_stake_years = v; }}},
        {"petition_quorum", {[](const ProtocolParams& p) { return p.petition_quorum; },
                             [](ProtocolParams& p, double v) { p.petition_quorum = v; }}},
        {"petition_majority", {[](const ProtocolParams& p) { return p.petition_majority; },
                               [](ProtocolParams& p, double v) { p.petition_majority = v; }}},
        {"interest_per_year", {[](const ProtocolParams& p) { return p.interest_per_year; },
                               [](ProtocolParams& p, double v) { p.interest_per_year = v; }}},
        {"epoch_days", {[](const ProtocolParams& p) { return p.epoch_days; },
                        [](ProtocolParams& p, double v) { p.epoch_days = v; }}},
        {"x_fee", {[](const ProtocolParams& p) { return double(p.x_fee) / kMilliPerUnit; },
                   [](ProtocolParams& p, double v) { p.x_fee = to_milli(v); }}},
        {"d", {[](const ProtocolParams& p) { return double(p.d) / kMilliPerUnit; },
               [](ProtocolParams& p, double v) { p.d = to_milli(v); }}},
        {"d_r", {[](const ProtocolParams& p) { return double(p.d_r) / kMilliPerUnit; },
                 [](ProtocolParams& p, double v) { p.d_r = to_milli(v); }}},
        {"delta", {[](const ProtocolParams& p) { return double(p.delta) / kMilliPerUnit; },
                   [](ProtocolParams& p, double v) { p.delta = to_milli(v); }}},
        {"fee_min", {[](const ProtocolParams& p) { return double(p.fee_min) / kMilliPerUnit; },
                     [](ProtocolParams& p, double v) { p.fee_min = to_milli(v); }}},
        {"voucher_grant_floor", {[](const ProtocolParams& p) { return p.voucher_grant_floor; },
                                 [](ProtocolParams& p, double v) { p.voucher_grant_floor = v; }}},
        {"margin_b", {[](const ProtocolParams& p) { return p.margin_b; },
                      [](ProtocolParams& p, double v) { p.margin_b = v; }}},
        {"margin_d", {[](const ProtocolParams& p) { return p.margin_d; },
                      [](ProtocolParams& p, double v) { p.margin_d = v; }}},
    };
    return table;
}

}  // namespace

void set_param(ProtocolParams& params, const std::string& name, double value) {
    auto it = param_table().find(name);
    if (it == param_table().end()) fail(Errc::ConfigInvalid, "unknown parameter '" + name + "'");
    ProtocolParams next = params;
    it->second.set(next, value);
    next.validate();
    params = next;
}

double get_param(const ProtocolParams& params, const std::string& name) {
    auto it = param_table().find(name);
    if (it == param_table().end()) fail(Errc::ConfigInvalid, "unknown parameter '" + name + "'");
    return it->second.get(params);
}

const std::vector<std::string>& param_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, _] : param_table()) v.push_back(name);
        return v;
    }();
    return names;
}

}  // namespace prsim
