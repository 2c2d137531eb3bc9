#include "prsim/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "prsim/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace prsim {

double expected_delta(const Strategy& strategy, double f_rej, double f_acc,
                      const ProtocolParams& params) {
    // Evaluate the payoff table at the ground-truth rates; the three terminal
    // classes carry probabilities f_rej, f_acc, 1 - f_rej - f_acc.
    RateEstimates ground;
    ground.bootstrap_f_rej = f_rej;
    ground.bootstrap_f_acc = f_acc;
    ground.bootstrap_until = 1;  // stay on the provided rates

    auto cell = [&](VoteOption o, TerminalOutcome t) { return prevote_payoff(o, t, ground, params); };
    auto row = [&](VoteOption o) {
        return f_rej * cell(o, TerminalOutcome::EarlyReject) +
               f_acc * cell(o, TerminalOutcome::ReviewAccept) +
               (1.0 - f_rej - f_acc) * cell(o, TerminalOutcome::ReviewReject);
    };

    switch (strategy.kind) {
        case StrategyKind::AlwaysA: return row(VoteOption::NoOpinion);
        case StrategyKind::AlwaysB: return row(VoteOption::RejectImmediately);
        case StrategyKind::AlwaysC: return row(VoteOption::Interesting);
        case StrategyKind::AlwaysD:
        case StrategyKind::HonestReviewer:
        case StrategyKind::NoisyReviewer: return row(VoteOption::WantReview);
        case StrategyKind::Mixture:
            return strategy.mix[0] * row(VoteOption::NoOpinion) +
                   strategy.mix[1] * row(VoteOption::RejectImmediately) +
                   strategy.mix[2] * row(VoteOption::Interesting) +
                   strategy.mix[3] * row(VoteOption::WantReview);
        case StrategyKind::Informed: {
            double fb = strategy.f_bad, fp = strategy.false_positive;
            double on_bad = fb * cell(VoteOption::RejectImmediately, TerminalOutcome::EarlyReject) +
                            (1.0 - fb) * cell(VoteOption::NoOpinion, TerminalOutcome::EarlyReject);
            double on_acc = (1.0 - fp) * cell(VoteOption::NoOpinion, TerminalOutcome::ReviewAccept) +
                            fp * cell(VoteOption::RejectImmediately, TerminalOutcome::ReviewAccept);
            double on_rej = (1.0 - fp) * cell(VoteOption::NoOpinion, TerminalOutcome::ReviewReject) +
                            fp * cell(VoteOption::RejectImmediately, TerminalOutcome::ReviewReject);
            return f_rej * on_bad + f_acc * on_acc + (1.0 - f_rej - f_acc) * on_rej;
        }
    }
    fail(Errc::DomainError, "unknown strategy");
}

namespace {

constexpr AccountId kAuthorBase = 100;
constexpr int kAuthorPool = 4;
constexpr AccountId kAgentBase = 1000;
constexpr AccountId kPanelBase = 5000;
constexpr double kCloseLag = 0.01;  // days past t_vote before the reject check

enum class PaperClass { EarlyRejectable, ReviewableReject, ReviewableAccept };

struct LatentItem {
    double p = 0.5;        // hypothesis prior
    double p_after = 0.5;  // hypothesis posterior
    double p_accept = 1.0; // measurement credence
};

struct SlotPlan {
    struct ItemDraw {
        double z1 = 0.0, z2 = 0.0, z3 = 0.0;
    };
    std::vector<ItemDraw> zs;  // per manifest item
    int importance = 0;
    double confidence = 1.0;
    double fraction_read = 1.0;
    double fraction_understood = 1.0;
    PaymentMethod payout = PaymentMethod::Cash;
};

struct ProtoEvent {
    double rel = 0.0;  // days after submission
    enum class K { Vote, Close, Report, Reply, Pass, Final, Funding } k = K::Vote;
    int slot = -1;
    AccountId voter = 0;
    VoteOption option = VoteOption::NoOpinion;
};

struct SubmissionScript {
    PaperClass cls = PaperClass::EarlyRejectable;
    AccountId author = 0;
    StatementManifest manifest;
    std::vector<LatentItem> latents;
    PollStatus close_outcome = PollStatus::EarlyReject;
    std::vector<SlotPlan> slots;
    Milli funding = 0;
    std::vector<ProtoEvent> events;
};

struct AgentDef {
    AccountId id = 0;
    Strategy strategy;
    int strategy_idx = 0;
};

struct GenContext {
    const ScenarioConfig* cfg = nullptr;
    std::vector<AgentDef> agents;
    int panel_b = 0;
    int panel_d = 0;
    double vote_window = 0.0;
};

VoteOption planned_option(const GenContext& ctx, const AgentDef& agent, PaperClass cls,
                          std::uint32_t j) {
    switch (agent.strategy.kind) {
        case StrategyKind::AlwaysA: return VoteOption::NoOpinion;
        case StrategyKind::AlwaysB: return VoteOption::RejectImmediately;
        case StrategyKind::AlwaysC: return VoteOption::Interesting;
        case StrategyKind::AlwaysD:
        case StrategyKind::HonestReviewer:
        case StrategyKind::NoisyReviewer: return VoteOption::WantReview;
        case StrategyKind::Mixture: {
            Rng rng(ctx.cfg->seed, stream_id(Draw::VoteOption, j, agent.id));
            double u = rng.next_double();
            const auto& w = agent.strategy.mix;
            if (u < w[0]) return VoteOption::NoOpinion;
            if (u < w[0] + w[1]) return VoteOption::RejectImmediately;
            if (u < w[0] + w[1] + w[2]) return VoteOption::Interesting;
            return VoteOption::WantReview;
        }
        case StrategyKind::Informed: {
            Rng rng(ctx.cfg->seed, stream_id(Draw::Detection, j, agent.id));
            double u = rng.next_double();
            if (cls == PaperClass::EarlyRejectable)
                return u < agent.strategy.f_bad ? VoteOption::RejectImmediately
                                                : VoteOption::NoOpinion;
            return u < agent.strategy.false_positive ? VoteOption::RejectImmediately
                                                     : VoteOption::NoOpinion;
        }
    }
    return VoteOption::NoOpinion;
}

SubmissionScript make_script(const GenContext& ctx, std::uint32_t j) {
    const ScenarioConfig& cfg = *ctx.cfg;
    const ProtocolParams& pp = cfg.params;
    SubmissionScript sc;

    {
        Rng rng(cfg.seed, stream_id(Draw::PaperClass, j));
        double u = rng.next_double();
        sc.cls = u < cfg.f_rej ? PaperClass::EarlyRejectable
                 : u < cfg.f_rej + cfg.f_acc ? PaperClass::ReviewableAccept
                                             : PaperClass::ReviewableReject;
    }
    sc.author = kAuthorBase + (j % kAuthorPool);

    // Latent paper content. Accepted-class papers teach something; rejected-class
    // papers barely move beliefs.
    {
        Rng rng(cfg.seed, stream_id(Draw::Latent, j));
        bool with_meas = rng.next_double() < 0.2;
        bool good = sc.cls == PaperClass::ReviewableAccept;
        StatementItem hyp;
        hyp.kind = StatementKind::Hypothesis;
        hyp.weight = with_meas ? 0.7 : 1.0;
        sc.manifest.items.push_back(hyp);
        LatentItem lh;
        if (good) {
            lh.p = rng.uniform(0.20, 0.45);
            lh.p_after = rng.uniform(0.85, 0.97);
        } else {
            lh.p = rng.uniform(0.35, 0.60);
            lh.p_after = std::clamp(lh.p + rng.uniform(-0.03, 0.03), 0.01, 0.99);
        }
        sc.latents.push_back(lh);
        if (with_meas) {
            StatementItem meas;
            meas.kind = StatementKind::Measurement;
            meas.weight = 0.3;
            meas.prior_mu = 0.0;
            meas.prior_sigma = 1.0;
            if (good) {
                meas.claimed_mu = 1.0 + rng.uniform(0.0, 0.5);
                meas.claimed_sigma = rng.uniform(0.4, 0.6);
            } else {
                meas.claimed_mu = rng.uniform(-0.05, 0.05);
                meas.claimed_sigma = rng.uniform(0.95, 1.05);
            }
            sc.manifest.items.push_back(meas);
            LatentItem lm;
            lm.p_accept = good ? rng.uniform(0.90, 1.0) : rng.uniform(0.80, 1.0);
            sc.latents.push_back(lm);
        }
    }

    // Vote plan: strategic agents plus the scripted quorum panel. The panel
    // fixes the terminal class: a reject wall for early-rejectable papers, a
    // volunteer bench otherwise. Panel votes stay inside [0, t_vote).
    struct Planned {
        AccountId voter;
        VoteOption option;
        double at;
    };
    std::vector<Planned> plan;
    for (const AgentDef& agent : ctx.agents) {
        Rng rng(cfg.seed, stream_id(Draw::VoteTime, j, agent.id));
        plan.push_back(Planned{agent.id, planned_option(ctx, agent, sc.cls, j),
                               rng.uniform(0.0, ctx.vote_window)});
    }
    bool early = sc.cls == PaperClass::EarlyRejectable;
    int n_panel = early ? ctx.panel_b : ctx.panel_d;
    for (int k = 0; k < n_panel; ++k) {
        AccountId id = kPanelBase + k;
        Rng rng(cfg.seed, stream_id(Draw::VoteTime, j, id));
        plan.push_back(Planned{id, early ? VoteOption::RejectImmediately : VoteOption::WantReview,
                               rng.uniform(0.0, pp.t_vote * 0.95)});
    }
    std::sort(plan.begin(), plan.end(), [](const Planned& a, const Planned& b) {
        return a.at < b.at || (a.at == b.at && a.voter < b.voter);
    });

    // Earliest instant the intended outcome fires. Checks happen right after a
    // vote lands (or at the window anchor), never between two votes. The
    // anchor sits a hair past t_vote so the elapsed time reconstructed from
    // absolute timestamps stays on the closed side of the window.
    sc.close_outcome = early ? PollStatus::EarlyReject : PollStatus::EnterReview;
    double anchor = pp.t_vote + kCloseLag;
    double close_rel = -1.0;
    std::size_t emitted = 0;
    std::vector<PreVote> prefix;
    for (std::size_t k = 0; k < plan.size(); ++k) {
        prefix.push_back(PreVote{plan[k].voter, plan[k].option, plan[k].at});
        double t_check = std::max(plan[k].at, anchor);
        if (k + 1 < plan.size() && plan[k + 1].at <= t_check) continue;
        if (poll_outcome(prefix, t_check, pp).status == sc.close_outcome) {
            close_rel = t_check;
            emitted = k + 1;
            break;
        }
    }
    if (close_rel < 0.0) fail(Errc::Unreachable, "panel failed to force the scripted poll outcome");

    for (std::size_t k = 0; k < emitted; ++k)
        sc.events.push_back(ProtoEvent{plan[k].at, ProtoEvent::K::Vote, -1, plan[k].voter,
                                       plan[k].option});
    sc.events.push_back(ProtoEvent{close_rel, ProtoEvent::K::Close});

    if (!early) {
        Rng misc(cfg.seed, stream_id(Draw::Misc, j));
        bool iterate = cfg.rounds_cap >= 2 && misc.next_double() < cfg.iteration_round_prob;
        bool good = sc.cls == PaperClass::ReviewableAccept;

        sc.slots.resize(pp.n_reviews);
        std::vector<double> round1(pp.n_reviews), finals(pp.n_reviews);
        for (int s = 0; s < pp.n_reviews; ++s) {
            SlotPlan& slot = sc.slots[s];
            Rng rb(cfg.seed, stream_id(Draw::Belief, j, s));
            slot.zs.resize(sc.manifest.items.size());
            for (auto& z : slot.zs) {
                z.z1 = rb.normal();
                z.z2 = rb.normal();
                z.z3 = rb.normal();
            }
            slot.importance = good ? 3 + int(rb.below(3)) : int(rb.below(3));
            slot.confidence = rb.uniform(0.6, 1.0);
            slot.fraction_read = rb.uniform(0.7, 1.0);
            slot.fraction_understood = rb.uniform(0.6, 1.0);
            Rng rp(cfg.seed, stream_id(Draw::Payout, j, s));
            slot.payout = rp.next_double() < cfg.voucher_payout_prob ? PaymentMethod::Voucher
                                                                     : PaymentMethod::Cash;
            Rng rt(cfg.seed, stream_id(Draw::ReportTime, j, s));
            round1[s] = iterate ? rt.uniform(0.2, 1.5) : rt.uniform(0.05, 0.3);
            bool late = rt.next_double() < cfg.late_report_prob;
            finals[s] = late ? pp.review_due_days + rt.uniform(0.1, 0.9) * pp.replace_window_days
                             : rt.uniform(0.3, 2.0);
        }

        double finals_open;
        if (iterate) {
            for (int s = 0; s < pp.n_reviews; ++s)
                sc.events.push_back(
                    ProtoEvent{close_rel + round1[s], ProtoEvent::K::Report, s});
            double reply = *std::max_element(round1.begin(), round1.end()) + misc.uniform(0.2, 1.0);
            sc.events.push_back(ProtoEvent{close_rel + reply, ProtoEvent::K::Reply});
            double last_pass = 0.0;
            for (int s = 0; s < pp.n_reviews; ++s) {
                double pass = reply + misc.uniform(0.2, 1.5);
                last_pass = std::max(last_pass, pass);
                sc.events.push_back(ProtoEvent{close_rel + pass, ProtoEvent::K::Pass, s});
            }
            finals_open = close_rel + last_pass;
        } else {
            for (int s = 0; s < pp.n_reviews; ++s)
                sc.events.push_back(ProtoEvent{close_rel + round1[s], ProtoEvent::K::Pass, s});
            finals_open = close_rel + *std::max_element(round1.begin(), round1.end());
        }
        double decided = 0.0;
        for (int s = 0; s < pp.n_reviews; ++s) {
            sc.events.push_back(ProtoEvent{finals_open + finals[s], ProtoEvent::K::Final, s});
            decided = std::max(decided, finals_open + finals[s]);
        }
        if (cfg.auction_revenue && good) {
            Rng ra(cfg.seed, stream_id(Draw::Auction, j));
            double amount = cfg.auction_median * std::exp(cfg.auction_sigma * ra.normal());
            sc.funding = static_cast<Milli>(std::llround(amount * kMilliPerUnit));
            sc.events.push_back(ProtoEvent{decided + 1.0, ProtoEvent::K::Funding});
        }
    }

    std::stable_sort(sc.events.begin(), sc.events.end(),
                     [](const ProtoEvent& a, const ProtoEvent& b) { return a.rel < b.rel; });
    return sc;
}

std::string make_conclusion(int min_len) {
    static const std::string sentence =
        "The claims were checked against the stated evidence and the scores reflect "
        "the net change in confidence after the discussion rounds. ";
    std::string out;
    while (static_cast<int>(out.size()) < min_len) out += sentence;
    return out;
}

double noise_for(const GenContext& ctx, AccountId reviewer) {
    if (reviewer >= kAgentBase && reviewer < kAgentBase + ctx.agents.size()) {
        const Strategy& st = ctx.agents[reviewer - kAgentBase].strategy;
        if (st.kind == StrategyKind::NoisyReviewer) return st.noise;
    }
    return ctx.cfg->reviewer_noise;
}

ReviewerBeliefs materialize_beliefs(const GenContext& ctx, const SubmissionScript& sc,
                                    const SlotPlan& slot, AccountId reviewer) {
    double noise = noise_for(ctx, reviewer);
    ReviewerBeliefs rb;
    rb.importance = slot.importance;
    for (std::size_t i = 0; i < sc.manifest.items.size(); ++i) {
        const LatentItem& lat = sc.latents[i];
        const SlotPlan::ItemDraw& z = slot.zs[i];
        BeliefItem b;
        b.kind = sc.manifest.items[i].kind;
        if (b.kind == StatementKind::Hypothesis) {
            b.p = std::clamp(lat.p + noise * z.z1, 0.01, 0.99);
            b.p_after = std::clamp(lat.p_after + noise * z.z2, 0.01, 0.99);
        } else {
            b.p_accept = std::clamp(lat.p_accept + noise * z.z3, 0.0, 1.0);
        }
        rb.items.push_back(b);
    }
    return rb;
}

struct WelfordAcc {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }
    double std_err() const {
        if (n < 2) return 0.0;
        return std::sqrt(m2 / double(n - 1) / double(n));
    }
};

}  // namespace

RunResult run_scenario_full(const ScenarioConfig& cfg, const std::string& out_dir, int threads) {
    cfg.validate();
    const ProtocolParams& pp = cfg.params;

    GenContext ctx;
    ctx.cfg = &cfg;
    std::vector<int> per_strategy = cfg.agents_per_strategy();
    {
        AccountId next = kAgentBase;
        for (std::size_t si = 0; si < per_strategy.size(); ++si)
            for (int k = 0; k < per_strategy[si]; ++k)
                ctx.agents.push_back(AgentDef{next++, cfg.strategy_mix[si].first, int(si)});
    }
    int a = static_cast<int>(ctx.agents.size());
    ctx.panel_b = std::max(a + 1, pp.n_votes + 1 - a);
    ctx.panel_d = std::max({pp.n_reviews, pp.n_votes - a, a});
    ctx.vote_window = cfg.vote_window_days > 0.0 ? cfg.vote_window_days : pp.t_vote;

    EngineOptions opts;
    opts.initial_treasury = cfg.initial_treasury;
    opts.default_wallet = cfg.author_funds;
    opts.record_history = cfg.record_history;
    EngineState state = initial_state(pp, opts);

    RunReport report;
    report.scenario = cfg.name;
    report.seed = cfg.seed;
    report.n_submissions = cfg.n_submissions;
    report.treasury_initial = cfg.initial_treasury;

    std::ofstream log_file;
    bool persist = cfg.persist_log && !out_dir.empty();
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    if (persist) {
        report.log_path = out_dir + "/" + cfg.name + ".events.ndjson";
        log_file.open(report.log_path, std::ios::trunc);
        if (!log_file) fail(Errc::ConfigInvalid, "cannot write log at " + report.log_path);
    }

    Fnv64 log_hash;
    std::uint64_t seq = 0;
    const std::string conclusion = make_conclusion(pp.min_conclusion_len);

    auto emit = [&](Timestamp at, EventPayload payload) {
        Event e{++seq, at, std::move(payload)};
        std::string line = event_to_line(e);
        line.push_back('\n');
        log_hash.put_bytes(line.data(), line.size());
        if (persist) log_file << line;
        apply_in_place(state, e);
    };

    const std::uint32_t n = static_cast<std::uint32_t>(cfg.n_submissions);

    // Arrival clock: Poisson interarrivals, precomputed so scripts stay pure
    // functions of their index.
    std::vector<double> submit_abs(n);
    {
        double t = 0.0;
        for (std::uint32_t j = 0; j < n; ++j) {
            Rng rng(cfg.seed, stream_id(Draw::Arrival, j));
            t += rng.exponential(1.0 / cfg.arrivals_per_day);
            submit_abs[j] = t;
        }
    }

    // Scripts are generated in blocks; inside a block the per-submission work is
    // independent, which is where the parallel kernel lives. threads == 1 runs
    // the plain serial loop and must produce byte-identical output.
    std::vector<std::unique_ptr<SubmissionScript>> scripts(n);
    std::uint32_t next_gen = 0;
    constexpr std::uint32_t kBlock = 1024;
    auto generate_until = [&](std::uint32_t j) {
        while (next_gen <= j) {
            std::uint32_t lo = next_gen, hi = std::min(n, next_gen + kBlock);
#ifdef _OPENMP
            if (threads != 1) {
                int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
                for (std::int64_t q = lo; q < std::int64_t(hi); ++q)
                    scripts[q] = std::make_unique<SubmissionScript>(make_script(ctx, q));
            } else
#endif
            {
                (void)threads;
                for (std::uint32_t q = lo; q < hi; ++q)
                    scripts[q] = std::make_unique<SubmissionScript>(make_script(ctx, q));
            }
            next_gen = hi;
        }
    };

    struct Step {
        double t;
        std::uint32_t j;
        std::uint32_t cursor;
    };
    auto later = [](const Step& x, const Step& y) {
        return x.t > y.t || (x.t == y.t && (x.j > y.j || (x.j == y.j && x.cursor > y.cursor)));
    };
    std::priority_queue<Step, std::vector<Step>, decltype(later)> heap(later);
    std::map<std::uint32_t, std::vector<AccountId>> committee;

    std::uint32_t opened = 0;
    while (opened < n || !heap.empty()) {
        double t_arr = opened < n ? submit_abs[opened] : std::numeric_limits<double>::infinity();
        if (heap.empty() || heap.top().t >= t_arr) {
            generate_until(opened);
            const SubmissionScript& sc = *scripts[opened];
            SubmitEv sub;
            sub.submission = opened + 1;
            sub.authors = {sc.author};
            sub.payment = PaymentMethod::Cash;
            sub.manifest = sc.manifest;
            emit(t_arr, std::move(sub));
            if (!sc.events.empty()) heap.push(Step{t_arr + sc.events[0].rel, opened, 0});
            ++opened;
            continue;
        }

        Step step = heap.top();
        heap.pop();
        const SubmissionScript& sc = *scripts[step.j];
        const ProtoEvent& pe = sc.events[step.cursor];
        SubmissionId sid = step.j + 1;
        Timestamp at = step.t;

        switch (pe.k) {
            case ProtoEvent::K::Vote:
                emit(at, PreVoteEv{sid, pe.voter, pe.option});
                break;
            case ProtoEvent::K::Close: {
                if (sc.close_outcome == PollStatus::EnterReview) {
                    std::uint64_t dseed = Rng(cfg.seed, stream_id(Draw::Selection, step.j)).next_u64();
                    std::vector<AccountId> sel =
                        select_reviewers(review_candidates(state, sid, at), pp.n_reviews, pp, dseed);
                    committee[step.j] = sel;
                    emit(at, PollClosedEv{sid, PollStatus::EnterReview, sel, dseed});
                } else {
                    emit(at, PollClosedEv{sid, sc.close_outcome, {}, 0});
                }
                break;
            }
            case ProtoEvent::K::Report: {
                AccountId rev = committee.at(step.j)[pe.slot];
                emit(at, ReportFiledEv{sid, rev,
                                       {ReviewRequest{RequestKind::Clarification,
                                                      "please quantify the stated uncertainty"}}});
                break;
            }
            case ProtoEvent::K::Reply:
                emit(at, AuthorReplyEv{sid, "uncertainty bands added as requested", "v2"});
                break;
            case ProtoEvent::K::Pass:
                emit(at, ReviewerPassEv{sid, committee.at(step.j)[pe.slot]});
                break;
            case ProtoEvent::K::Final: {
                AccountId rev = committee.at(step.j)[pe.slot];
                const SlotPlan& slot = sc.slots[pe.slot];
                FinalReportEv fr;
                fr.submission = sid;
                fr.reviewer = rev;
                fr.beliefs = materialize_beliefs(ctx, sc, slot, rev);
                fr.confidence = slot.confidence;
                fr.fraction_read = slot.fraction_read;
                fr.fraction_understood = slot.fraction_understood;
                fr.conclusion = conclusion;
                fr.payout = slot.payout;
                emit(at, std::move(fr));
                break;
            }
            case ProtoEvent::K::Funding:
                if (state.submissions.at(sid).stage == SubmissionStage::Accepted)
                    emit(at, FundingReceivedEv{sc.funding, "auction", false});
                break;
        }

        if (step.cursor + 1 < sc.events.size()) {
            heap.push(Step{submit_abs[step.j] + sc.events[step.cursor + 1].rel, step.j,
                           step.cursor + 1});
        } else {
            committee.erase(step.j);
            scripts[step.j].reset();
        }
    }

    if (persist) log_file.close();

    // Aggregate per-strategy payoffs from the ledger's settlement history,
    // clustered per submission so standard errors come from independent draws.
    std::vector<WelfordAcc> acc(cfg.strategy_mix.size());
    std::vector<std::map<SubmissionId, std::pair<double, int>>> grouped(cfg.strategy_mix.size());
    for (const AgentDef& agent : ctx.agents) {
        const Account* account = state.find_account(agent.id);
        if (!account) continue;
        for (const DeltaRecord& d : account->history)
            if (d.cause == DeltaCause::PreVote) {
                auto& cell = grouped[agent.strategy_idx][d.submission];
                cell.first += d.delta;
                cell.second += 1;
            }
    }
    for (std::size_t si = 0; si < cfg.strategy_mix.size(); ++si)
        for (const auto& [sub, cell] : grouped[si]) acc[si].add(cell.first / cell.second);

    for (std::size_t si = 0; si < cfg.strategy_mix.size(); ++si) {
        StrategyStats st;
        st.label = cfg.strategy_mix[si].first.label();
        st.agents = per_strategy[si];
        st.samples = acc[si].n;
        st.mean_delta = acc[si].mean;
        st.std_err = acc[si].std_err();
        st.expected = expected_delta(cfg.strategy_mix[si].first, cfg.f_rej, cfg.f_acc, pp);
        report.strategies.push_back(std::move(st));
    }

    for (const auto& [id, rec] : state.submissions) {
        switch (rec.stage) {
            case SubmissionStage::EarlyRejected: ++report.early_rejected; break;
            case SubmissionStage::Accepted: ++report.accepted; break;
            case SubmissionStage::Rejected: ++report.rejected; break;
            case SubmissionStage::Failed: ++report.failed; break;
            default: break;
        }
    }
    report.events = seq;
    report.log_hash = log_hash.value();
    report.final_state_hash = state_hash(state);
    report.f_rej_estimate = state.rates.f_rej();
    report.f_acc_estimate = state.rates.f_acc();
    report.treasury_final = state.treasury.balance;
    report.treasury_intake = state.treasury.intake_total;
    report.treasury_outflow = state.treasury.outflow_total;
    report.conserved = state.treasury.intake_total - state.treasury.outflow_total ==
                       state.treasury.balance - state.treasury.initial;
    report.vouchers_backed = state.treasury.backed_vouchers;
    report.vouchers_unbacked = state.treasury.unbacked_vouchers;

    if (!out_dir.empty()) {
        report.ledger_path = out_dir + "/" + cfg.name + ".ledger.json";
        std::ofstream ledger(report.ledger_path, std::ios::trunc);
        ledger << ledger_to_json(state) << '\n';
        std::ofstream rep(out_dir + "/" + cfg.name + ".report.json", std::ios::trunc);
        rep << report_to_json(report) << '\n';
        // A log plus this sidecar fully determines the run for `replay`.
        nlohmann::json pj;
        for (const std::string& name : param_names()) pj["params"][name] = get_param(pp, name);
        pj["engine"] = {{"initial_treasury_milli", cfg.initial_treasury},
                        {"default_wallet_milli", cfg.author_funds},
                        {"record_history", cfg.record_history}};
        std::ofstream pf(out_dir + "/" + cfg.name + ".params.json", std::ios::trunc);
        pf << pj.dump(2) << '\n';
    }

    return RunResult{std::move(report), std::move(state)};
}

RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_dir, int threads) {
    return run_scenario_full(cfg, out_dir, threads).report;
}

double calibrate_threshold(const ScenarioConfig& cfg, double target_accept, int pilot_submissions) {
    if (!(target_accept >= 0.0 && target_accept <= 1.0))
        fail(Errc::ConfigInvalid, "target acceptance must be in [0,1]");
    ScenarioConfig pilot = cfg;
    pilot.name = cfg.name + "-pilot";
    pilot.n_submissions = std::max(pilot_submissions, 5000);
    pilot.persist_log = false;
    pilot.record_history = false;
    RunResult rr = run_scenario_full(pilot, "", 0);

    std::vector<double> qs;
    for (const auto& [id, rec] : rr.state.submissions)
        if (rec.stage == SubmissionStage::Accepted || rec.stage == SubmissionStage::Rejected)
            qs.push_back(rec.aggregate_q);
    std::sort(qs.begin(), qs.end(), std::greater<>());

    const double total = double(pilot.n_submissions);
    const std::int64_t decided = std::int64_t(qs.size());
    std::int64_t want = std::llround(target_accept * total);
    // Walk candidate cut counts outward from the target until one both lands
    // within tolerance and is realizable as a threshold between two distinct
    // quality values.
    for (std::int64_t off = 0; off <= decided + 1; ++off) {
        for (std::int64_t k : {want - off, want + off}) {
            if (k < 0 || k > decided) continue;
            if (std::abs(double(k) / total - target_accept) > 0.005) continue;
            if (k == 0) return qs.empty() ? 1.0 : qs.front() + 1.0;
            if (k == decided) return qs.back() - 1.0;
            if (qs[k - 1] > qs[k]) return 0.5 * (qs[k - 1] + qs[k]);
        }
        if (off > std::llround(0.005 * total) + 1 && off > 0) break;
    }
    fail(Errc::Unreachable, "quality distribution cannot be split at the target rate");
}

std::string report_to_json(const RunReport& r) {
    nlohmann::json j;
    j["scenario"] = r.scenario;
    j["seed"] = r.seed;
    j["n_submissions"] = r.n_submissions;
    j["events"] = r.events;
    j["log_hash"] = hex64(r.log_hash);
    j["state_hash"] = hex64(r.final_state_hash);
    if (!r.log_path.empty()) j["log_path"] = r.log_path;
    if (!r.ledger_path.empty()) j["ledger_path"] = r.ledger_path;
    j["outcomes"] = {{"early_rejected", r.early_rejected},
                     {"accepted", r.accepted},
                     {"rejected", r.rejected},
                     {"failed", r.failed}};
    j["rate_estimates"] = {{"f_rej", r.f_rej_estimate}, {"f_acc", r.f_acc_estimate}};
    j["treasury"] = {{"initial_milli", r.treasury_initial},
                     {"final_milli", r.treasury_final},
                     {"intake_milli", r.treasury_intake},
                     {"outflow_milli", r.treasury_outflow},
                     {"conserved", r.conserved},
                     {"vouchers_backed", r.vouchers_backed},
                     {"vouchers_unbacked", r.vouchers_unbacked}};
    nlohmann::json arr = nlohmann::json::array();
    for (const StrategyStats& s : r.strategies) {
        arr.push_back({{"strategy", s.label},
                       {"agents", s.agents},
                       {"samples", s.samples},
                       {"mean_delta", s.mean_delta},
                       {"std_err", s.std_err},
                       {"expected", s.expected}});
    }
    j["strategies"] = std::move(arr);
    return j.dump(2);
}

RunReport report_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::ParseError, "cannot open report '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::ParseError, std::string("bad report: ") + e.what());
    }
    RunReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n_submissions = j.at("n_submissions").get<int>();
    r.events = j.at("events").get<std::uint64_t>();
    r.log_hash = std::stoull(j.at("log_hash").get<std::string>(), nullptr, 16);
    r.final_state_hash = std::stoull(j.at("state_hash").get<std::string>(), nullptr, 16);
    if (j.contains("log_path")) r.log_path = j["log_path"].get<std::string>();
    if (j.contains("ledger_path")) r.ledger_path = j["ledger_path"].get<std::string>();
    r.early_rejected = j.at("outcomes").at("early_rejected").get<std::int64_t>();
    r.accepted = j.at("outcomes").at("accepted").get<std::int64_t>();
    r.rejected = j.at("outcomes").at("rejected").get<std::int64_t>();
    r.failed = j.at("outcomes").at("failed").get<std::int64_t>();
    r.f_rej_estimate = j.at("rate_estimates").at("f_rej").get<double>();
    r.f_acc_estimate = j.at("rate_estimates").at("f_acc").get<double>();
    r.treasury_initial = j.at("treasury").at("initial_milli").get<Milli>();
    r.treasury_final = j.at("treasury").at("final_milli").get<Milli>();
    r.treasury_intake = j.at("treasury").at("intake_milli").get<Milli>();
    r.treasury_outflow = j.at("treasury").at("outflow_milli").get<Milli>();
    r.conserved = j.at("treasury").at("conserved").get<bool>();
    r.vouchers_backed = j.at("treasury").at("vouchers_backed").get<std::int64_t>();
    r.vouchers_unbacked = j.at("treasury").at("vouchers_unbacked").get<std::int64_t>();
    for (const auto& s : j.at("strategies")) {
        StrategyStats st;
        st.label = s.at("strategy").get<std::string>();
        st.agents = s.at("agents").get<int>();
        st.samples = s.at("samples").get<std::int64_t>();
        st.mean_delta = s.at("mean_delta").get<double>();
        st.std_err = s.at("std_err").get<double>();
        st.expected = s.at("expected").get<double>();
        r.strategies.push_back(std::move(st));
    }
    return r;
}

}  // namespace prsim
