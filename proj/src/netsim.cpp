#include "dqsnet/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "dqsnet/metrology.hpp"

namespace dqsnet::netsim {

namespace {

using densmat::DensityMatrix;

// Same-timestamp ordering: cutoffs fire first so no state is used at or past
// its deadline, then purification, swapping and generation per the protocol
// priorities, with the window close processed after everything else due.
enum Priority : int {
    kCutoff = 0,
    kPurify = 1,
    kSwap = 2,
    kHerald = 3,
    kAttemptTick = 4,
    kWindowEnd = 9,
};

enum class EventKind { Cutoff, Purify, Swap, Herald, AttemptTick, WindowEnd };

struct Event {
    double time = 0.0;
    int priority = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::WindowEnd;
    int link = -1;
    int a = 0;  // segment index / span lo / chain position / pair id
    int b = 0;  // span hi
    double emission_time = 0.0;
};

struct EventAfter {
    bool operator()(const Event& x, const Event& y) const {
        return std::tie(x.time, x.priority, x.seq) > std::tie(y.time, y.priority, y.seq);
    }
};

struct Pool {
    int capacity = 0;
    int in_use = 0;
    int free() const { return capacity - in_use; }
};

struct PairRec {
    bool alive = false;
    int link = -1;
    int lo = 0, hi = 0;  // chain positions spanned
    bell::BellDiagonalState state;
    double available_after = 0.0;
    double deadline = 0.0;
    int pool_lo = -1, pool_hi = -1;
};

std::string format_time(double t) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9f", t);
    return buf;
}

// Error-free local basis rotation applied to both pairs ahead of the bilocal
// CNOT (the DEJMPS recurrence step). On Bell components it exchanges Phi-
// and Psi-, so phase errors accumulated in storage become filterable instead
// of piling up at the map's degenerate fixed point. Single-qubit gates carry
// no error in this hardware model.
bell::BellDiagonalState dejmps_rotate(const bell::BellDiagonalState& s) {
    bell::BellDiagonalState out = s;
    std::swap(out.lambdas[1], out.lambdas[3]);
    return out;
}

class TrialEngine {
public:
    TrialEngine(const NetworkScenario& s, Rng& rng, std::vector<std::string>* log)
        : s_(s), rng_(rng), log_(log) {
        const int links = s_.num_links();
        const int segs = s_.segments_per_link();
        const int center_alloc = s_.memories_center / links;

        // pools[link][position]: position p owns the memories node p devotes
        // to each adjacent segment; chain positions 0 (center) .. segs (end)
        pools_.assign(links, std::vector<std::vector<Pool>>());
        for (int l = 0; l < links; ++l) {
            pools_[l].assign(segs + 1, std::vector<Pool>());
            for (int p = 0; p <= segs; ++p) {
                if (p == 0) pools_[l][p] = {Pool{center_alloc, 0}};
                else if (p == segs) pools_[l][p] = {Pool{s_.memories_per_end_node, 0}};
                else pools_[l][p] = {Pool{s_.memories_per_repeater / 2, 0}, Pool{s_.memories_per_repeater / 2, 0}};
            }
        }

        raw_state_.lambdas = {s_.raw_fidelity, (1.0 - s_.raw_fidelity) * s_.raw_residual_pattern[0],
                              (1.0 - s_.raw_fidelity) * s_.raw_residual_pattern[1],
                              (1.0 - s_.raw_fidelity) * s_.raw_residual_pattern[2]};
    }

    TrialRecord run(int trial_index, densmat::Matrix* state_accumulator) {
        if (log_) log(0.0, "trial_start", "-", std::to_string(trial_index));
        for (int l = 0; l < s_.num_links(); ++l)
            for (int seg = 0; seg < s_.segments_per_link(); ++seg)
                push(Event{0.0, kAttemptTick, next_seq(), EventKind::AttemptTick, l, seg});
        push(Event{s_.window_s, kWindowEnd, next_seq(), EventKind::WindowEnd});

        while (!queue_.empty()) {
            const Event ev = queue_.top();
            queue_.pop();
            now_ = ev.time;
            switch (ev.kind) {
                case EventKind::AttemptTick: on_attempt_tick(ev); break;
                case EventKind::Herald: on_herald(ev); break;
                case EventKind::Cutoff: on_cutoff(ev); break;
                case EventKind::Purify: on_purify(ev); break;
                case EventKind::Swap: on_swap(ev); break;
                case EventKind::WindowEnd: return on_window_end(trial_index, state_accumulator);
            }
        }
        throw std::logic_error("event queue drained before window end");
    }

private:
    // ---- helpers ----------------------------------------------------------

    std::uint64_t next_seq() { return seq_++; }

    void push(Event ev) { queue_.push(ev); }

    void log(double t, const char* event, const std::string& link, const std::string& outcome) {
        if (!log_) return;
        log_->push_back(format_time(t) + "\t" + event + "\t" + link + "\t" + outcome);
    }

    std::string segment_label(int link, int seg) const {
        return "link" + std::to_string(link) + ".seg" + std::to_string(seg);
    }

    std::string span_label(int link, int lo, int hi) const {
        if (lo == 0 && hi == s_.segments_per_link()) return "link" + std::to_string(link);
        return "link" + std::to_string(link) + "." + std::to_string(lo) + "-" + std::to_string(hi);
    }

    int pool_index(int link, int position, bool right_side) const {
        return pools_[link][position].size() == 1 ? 0 : (right_side ? 1 : 0);
    }

    // Pool a chain node devotes to the segment on its right / left.
    int pool_for_segment_left_end(int link, int seg) const { return pool_index(link, seg, true); }
    int pool_for_segment_right_end(int link, int seg) const { return pool_index(link, seg + 1, false); }

    bell::BellDiagonalState advanced_copy(const PairRec& p, double t) const {
        const double dt = std::max(0.0, t - p.state.last_update_time);
        if (dt == 0.0) return p.state;
        auto out = bell::decohere(p.state, dt, dt, s_.memory, s_.memory);
        out.last_update_time = t;
        return out;
    }

    void advance(PairRec& p, double t) { p.state = advanced_copy(p, t); }

    void release(PairRec& p) {
        p.alive = false;
        pools_[p.link][p.lo][p.pool_lo].in_use--;
        pools_[p.link][p.hi][p.pool_hi].in_use--;
    }

    std::vector<int>& span_bucket(int link, int lo, int hi) {
        return span_index_[(static_cast<std::uint64_t>(link) << 16) |
                           (static_cast<std::uint64_t>(lo) << 8) | static_cast<std::uint64_t>(hi)];
    }

    std::vector<int> span_pairs(int link, int lo, int hi, bool available_only) {
        std::vector<int>& bucket = span_bucket(link, lo, hi);
        bucket.erase(std::remove_if(bucket.begin(), bucket.end(),
                                    [&](int id) { return !pairs_[id].alive; }),
                     bucket.end());
        std::vector<int> ids;
        for (int id : bucket) {
            if (available_only && pairs_[id].available_after > now_ + 1e-15) continue;
            ids.push_back(id);
        }
        return ids;
    }

    void schedule_span_check(int link, int lo, int hi) {
        auto ids = span_pairs(link, lo, hi, false);
        if (ids.size() < 2) return;
        std::vector<double> avail;
        for (int id : ids) avail.push_back(pairs_[id].available_after);
        std::sort(avail.begin(), avail.end());
        push(Event{std::max(now_, avail[1]), kPurify, next_seq(), EventKind::Purify, link, lo, hi});
    }

    void schedule_swap_check(int link, int position) {
        if (position <= 0 || position >= s_.segments_per_link()) return;
        double left_best = std::numeric_limits<double>::infinity();
        double right_best = std::numeric_limits<double>::infinity();
        for (int lo = 0; lo < position; ++lo)
            for (int id : span_pairs(link, lo, position, false))
                left_best = std::min(left_best, pairs_[id].available_after);
        for (int hi = position + 1; hi <= s_.segments_per_link(); ++hi)
            for (int id : span_pairs(link, position, hi, false))
                right_best = std::min(right_best, pairs_[id].available_after);
        if (std::isinf(left_best) || std::isinf(right_best)) return;
        push(Event{std::max(now_, std::max(left_best, right_best)), kSwap, next_seq(), EventKind::Swap,
                   link, position});
    }

    // ---- event handlers ---------------------------------------------------

    void on_attempt_tick(const Event& ev) {
        const double lat = s_.herald_latency_s();
        if (now_ + lat <= s_.window_s) {
            Pool& left = pools_[ev.link][ev.a][pool_for_segment_left_end(ev.link, ev.a)];
            Pool& right = pools_[ev.link][ev.a + 1][pool_for_segment_right_end(ev.link, ev.a)];
            const int launches = std::min(left.free(), right.free());
            for (int i = 0; i < launches; ++i) {
                left.in_use++;
                right.in_use++;
                if (log_) log(now_, "attempt", segment_label(ev.link, ev.a), "start");
                push(Event{now_ + lat, kHerald, next_seq(), EventKind::Herald, ev.link, ev.a, 0, now_});
            }
            const double next = now_ + s_.attempt_interval_s();
            if (next + lat <= s_.window_s)
                push(Event{next, kAttemptTick, next_seq(), EventKind::AttemptTick, ev.link, ev.a});
        }
    }

    void on_herald(const Event& ev) {
        const int li = pool_for_segment_left_end(ev.link, ev.a);
        const int ri = pool_for_segment_right_end(ev.link, ev.a);
        Pool& left = pools_[ev.link][ev.a][li];
        Pool& right = pools_[ev.link][ev.a + 1][ri];
        if (!rng_.bernoulli(s_.attempt_success_prob())) {
            left.in_use--;
            right.in_use--;
            log(now_, "herald", segment_label(ev.link, ev.a), "fail");
            return;
        }
        const double deadline = ev.emission_time + s_.cutoff_deadline_s();
        if (deadline <= now_) {  // cutoff shorter than the heralding latency
            left.in_use--;
            right.in_use--;
            log(now_, "herald", segment_label(ev.link, ev.a), "expired");
            return;
        }
        PairRec p;
        p.alive = true;
        p.link = ev.link;
        p.lo = ev.a;
        p.hi = ev.a + 1;
        const double dt = now_ - ev.emission_time;
        p.state = bell::decohere(raw_state_, dt, dt, s_.memory, s_.memory);
        p.state.last_update_time = now_;
        p.available_after = now_;
        p.deadline = deadline;
        p.pool_lo = li;
        p.pool_hi = ri;
        const int id = static_cast<int>(pairs_.size());
        pairs_.push_back(p);
        span_bucket(ev.link, p.lo, p.hi).push_back(id);
        log(now_, "herald", segment_label(ev.link, ev.a), "success");
        if (deadline <= s_.window_s)
            push(Event{deadline, kCutoff, next_seq(), EventKind::Cutoff, ev.link, id});
        schedule_span_check(ev.link, p.lo, p.hi);
        schedule_swap_check(ev.link, p.lo);
        schedule_swap_check(ev.link, p.hi);
    }

    void on_cutoff(const Event& ev) {
        PairRec& p = pairs_[ev.a];
        if (!p.alive || p.deadline > now_ + 1e-15) return;
        log(now_, "cutoff_reset", span_label(p.link, p.lo, p.hi), "reset");
        release(p);
    }

    void on_purify(const Event& ev) {
        auto ids = span_pairs(ev.link, ev.a, ev.b, true);
        if (ids.size() < 2) return;

        std::vector<std::pair<double, int>> ranked;  // (current fidelity, id)
        for (int id : ids) ranked.emplace_back(advanced_copy(pairs_[id], now_).fidelity(), id);
        std::sort(ranked.begin(), ranked.end());
        const int low_id = ranked[0].second;
        const int kept_id = ranked[1].second;  // better of the two lowest

        advance(pairs_[kept_id], now_);
        advance(pairs_[low_id], now_);
        const auto result =
            bell::purify(dejmps_rotate(pairs_[kept_id].state), dejmps_rotate(pairs_[low_id].state),
                         node_ops(ev.link, ev.a).gate_fidelity, node_ops(ev.link, ev.b).gate_fidelity,
                         node_ops(ev.link, ev.a).measurement_fidelity,
                         node_ops(ev.link, ev.b).measurement_fidelity);
        const bool success = rng_.bernoulli(result.success_probability);
        log(now_, "purify", span_label(ev.link, ev.a, ev.b), success ? "success" : "fail");
        release(pairs_[low_id]);
        if (success) {
            PairRec& kept = pairs_[kept_id];
            kept.state = result.state;
            kept.state.last_update_time = now_ + s_.classical_comm_time();
            kept.available_after = now_ + s_.classical_comm_time();
        } else {
            release(pairs_[kept_id]);
        }
        schedule_span_check(ev.link, ev.a, ev.b);
    }

    void on_swap(const Event& ev) {
        const int pos = ev.a;
        int left_id = -1, right_id = -1;
        double left_f = -1.0, right_f = -1.0;
        for (int lo = 0; lo < pos; ++lo)
            for (int id : span_pairs(ev.link, lo, pos, true)) {
                const double f = advanced_copy(pairs_[id], now_).fidelity();
                if (f > left_f) { left_f = f; left_id = id; }
            }
        for (int hi = pos + 1; hi <= s_.segments_per_link(); ++hi)
            for (int id : span_pairs(ev.link, pos, hi, true)) {
                const double f = advanced_copy(pairs_[id], now_).fidelity();
                if (f > right_f) { right_f = f; right_id = id; }
            }
        if (left_id < 0 || right_id < 0) return;

        PairRec& left = pairs_[left_id];
        PairRec& right = pairs_[right_id];
        advance(left, now_);
        advance(right, now_);
        const bool success = rng_.bernoulli(s_.swap_success_prob);
        log(now_, "swap", span_label(ev.link, left.lo, right.hi), success ? "success" : "fail");
        if (!success) {
            release(left);
            release(right);
            return;
        }
        const auto& ops = s_.repeater_ops;
        PairRec merged;
        merged.alive = true;
        merged.link = ev.link;
        merged.lo = left.lo;
        merged.hi = right.hi;
        merged.state = bell::swap(left.state, right.state, ops, ops.measurement_fidelity,
                                  ops.measurement_fidelity);
        merged.state.last_update_time = now_ + s_.classical_comm_time();
        merged.available_after = now_ + s_.classical_comm_time();
        merged.deadline = std::min(left.deadline, right.deadline);
        merged.pool_lo = left.pool_lo;
        merged.pool_hi = right.pool_hi;

        // middle-node memories are measured out; outer halves carry over
        pools_[ev.link][pos][left.pool_hi].in_use--;
        pools_[ev.link][pos][right.pool_lo].in_use--;
        left.alive = false;
        right.alive = false;

        const int id = static_cast<int>(pairs_.size());
        const int mlo = merged.lo, mhi = merged.hi;
        pairs_.push_back(std::move(merged));
        span_bucket(ev.link, mlo, mhi).push_back(id);
        if (pairs_[id].deadline <= s_.window_s)
            push(Event{pairs_[id].deadline, kCutoff, next_seq(), EventKind::Cutoff, ev.link, id});
        schedule_span_check(ev.link, mlo, mhi);
        schedule_swap_check(ev.link, mlo);
        schedule_swap_check(ev.link, mhi);
    }

    const bell::OperationErrorModel& node_ops(int /*link*/, int position) const {
        if (position == 0) return s_.center_ops;
        if (position == s_.segments_per_link()) return s_.end_ops;
        return s_.repeater_ops;
    }

    TrialRecord on_window_end(int /*trial_index*/, densmat::Matrix* state_accumulator) {
        log(now_, "window_end", "-", "-");
        TrialRecord record;

        std::vector<bell::BellDiagonalState> link_pairs;
        bool complete = true;
        const int full = s_.segments_per_link();
        for (int l = 0; l < s_.num_links(); ++l) {
            auto ids = span_pairs(l, 0, full, false);
            for (int id : ids) advance(pairs_[id], now_);

            // fidelity-aware terminal purification: lowest two until <= 1 left
            while (ids.size() > 1) {
                std::sort(ids.begin(), ids.end(), [&](int x, int y) {
                    return std::make_pair(pairs_[x].state.fidelity(), x) <
                           std::make_pair(pairs_[y].state.fidelity(), y);
                });
                const int low = ids[0], kept = ids[1];
                const auto result = bell::purify(
                    dejmps_rotate(pairs_[kept].state), dejmps_rotate(pairs_[low].state),
                    s_.center_ops.gate_fidelity, s_.end_ops.gate_fidelity,
                    s_.center_ops.measurement_fidelity, s_.end_ops.measurement_fidelity);
                const bool success = rng_.bernoulli(result.success_probability);
                log(now_, "purify_final", span_label(l, 0, full), success ? "success" : "fail");
                release(pairs_[low]);
                ids.erase(ids.begin());
                if (success) {
                    pairs_[kept].state = result.state;
                    pairs_[kept].state.last_update_time = now_;
                } else {
                    release(pairs_[kept]);
                    ids.erase(ids.begin());
                }
            }
            if (ids.empty()) {
                complete = false;
                record.link_fidelities.push_back(std::numeric_limits<double>::quiet_NaN());
                log(now_, "assembly", span_label(l, 0, full), "missing");
            } else {
                link_pairs.push_back(pairs_[ids[0]].state);
                record.link_fidelities.push_back(pairs_[ids[0]].state.fidelity());
            }
        }

        if (!complete) {
            record.success = false;
            log(now_, "assembly", "-", "fail");
            return record;
        }

        const NodeOpsSet ops{s_.center_ops, s_.end_ops};
        const DensityMatrix probe = assemble(link_pairs, s_.assembly, ops, &rng_);
        record.success = true;
        record.fidelity = densmat::fidelity_to_ghz(probe);
        if (state_accumulator) {
            if (state_accumulator->size() == 0)
                *state_accumulator = densmat::Matrix::Zero(probe.dim(), probe.dim());
            *state_accumulator += probe.data();
        }
        log(now_, "assembly", "-", "success");
        return record;
    }

    const NetworkScenario& s_;
    Rng& rng_;
    std::vector<std::string>* log_;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::vector<std::vector<std::vector<Pool>>> pools_;  // [link][position][side]
    std::vector<PairRec> pairs_;
    std::map<std::uint64_t, std::vector<int>> span_index_;
    bell::BellDiagonalState raw_state_;
};

}  // namespace

DensityMatrix assemble(const std::vector<bell::BellDiagonalState>& pairs,
                       densmat::AssemblyMethod method, const NodeOpsSet& ops, Rng* rng) {
    if (pairs.empty() || pairs.size() > 2)
        throw std::invalid_argument("assemble: supported probe sizes are 2 and 3 qubits");
    for (const auto& p : pairs) p.validate();

    if (method == densmat::AssemblyMethod::Merging) {
        if (pairs.size() == 1) return DensityMatrix::from_bell_diagonal(pairs[0]);
        // qubits [end1, center, center', end2]; boundary CNOT and measurement
        // happen at the center node
        const DensityMatrix joint = densmat::tensor(DensityMatrix::from_bell_diagonal(pairs[0]),
                                                    DensityMatrix::from_bell_diagonal(pairs[1]));
        const densmat::NoisySpec noise{ops.center.gate_fidelity, ops.center.measurement_fidelity};
        if (rng) return densmat::ghz_merge_sampled(joint, 1, 2, noise, *rng);
        return densmat::ghz_merge(joint, 1, 2, noise);
    }

    // teleportation: standard GHZ circuit over teleported CNOTs, one per pair
    const densmat::NoisySpec center_noise{ops.center.gate_fidelity, ops.center.measurement_fidelity};
    const densmat::NoisySpec end_noise{ops.end.gate_fidelity, ops.end.measurement_fidelity};
    DensityMatrix state = DensityMatrix::plus_state();  // center sensor qubit
    for (const auto& pair : pairs) {
        const int sensors = state.num_qubits();
        state = densmat::tensor(state, DensityMatrix::computational(1, 0));  // new end sensor
        state = densmat::tensor(state, DensityMatrix::from_bell_diagonal(pair));
        const int b_center = sensors + 1, b_end = sensors + 2;
        state = rng ? densmat::cnot_teleport_sampled(state, b_center, b_end, 0, sensors, center_noise,
                                                     end_noise, *rng)
                    : densmat::cnot_teleport(state, b_center, b_end, 0, sensors, center_noise, end_noise);
    }
    return state;
}

SimResult run_campaign(const NetworkScenario& scenario, int trials, std::uint64_t seed,
                       const CampaignOptions& options) {
    scenario.validate();
    if (trials < 1) throw std::invalid_argument("run_campaign: need at least one trial");
    if (scenario.num_sensor_nodes > 3)
        throw std::invalid_argument("run_campaign: density-matrix assembly is capped at 3 sensor nodes");
    if (scenario.memories_center < scenario.num_links())
        throw std::invalid_argument("run_campaign: center needs at least one memory per link");

    SimResult result;
    result.trials = trials;
    result.seed = seed;
    result.trial_records.reserve(trials);

    densmat::Matrix sum;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(seed, static_cast<std::uint64_t>(trial));
        const bool keep_log = trial < options.log_trials;
        TrialEngine engine(scenario, rng, keep_log ? &result.event_log : nullptr);
        TrialRecord record = engine.run(trial, &sum);
        if (record.success) ++result.successes;
        result.trial_records.push_back(std::move(record));
    }

    result.success_probability = static_cast<double>(result.successes) / trials;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (result.successes == 0) {
        result.fidelity = result.eta = result.eta_tilde = result.eta_qfim = nan;
        result.eta_defined = false;
        return result;
    }

    const int d = scenario.num_sensor_nodes;
    DensityMatrix avg(d, sum / static_cast<double>(result.successes));
    result.fidelity = densmat::fidelity_to_ghz(avg);
    const double c = metrology::noise_coefficient(densmat::ghz_twirl(avg));
    result.eta = d * (1.0 - c);
    result.eta_tilde = result.success_probability * result.eta;
    result.eta_qfim =
        metrology::qfi_average_from_qfim(metrology::qfim_numeric(avg, metrology::SensingProblem{d, 1}));
    result.eta_defined = true;
    result.average_state = std::move(avg);
    return result;
}

}  // namespace dqsnet::netsim
