// Copyright 2026 The qee Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qee/adversaries.hpp"
#include "qee/game.hpp"
#include "qee/protocol.hpp"
#include "qee/qsdc.hpp"

namespace qee {

using Json = nlohmann::ordered_json;

enum class Scenario : std::uint8_t { Establish, Qsdc, Multiparty, Game };

inline std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::Establish: return "establish";
        case Scenario::Qsdc: return "qsdc";
        case Scenario::Multiparty: return "multiparty";
        case Scenario::Game: return "game";
    }
    return "?";
}

inline Scenario parse_scenario(std::string_view s) {
    for (auto v : {Scenario::Establish, Scenario::Qsdc, Scenario::Multiparty, Scenario::Game}) {
        if (to_string(v) == s) return v;
    }
    throw InvalidInput("unknown scenario '" + std::string(s) + "'");
}

enum class ReportFormat : std::uint8_t { Json, Csv };

inline ReportFormat parse_format(std::string_view s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    throw InvalidInput("unknown format '" + std::string(s) + "'");
}

/// A parameter varied across a sweep.
struct SweepSpec {
    std::string parameter = "n_decoys";  // n_decoys | checked
    std::vector<std::size_t> values;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::Establish;
    EstablishmentConfig cfg;
    std::optional<AttackSpec> attack;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    std::size_t message_bits = 32;  // qsdc only
    std::optional<GameSpec> game;
    std::optional<SweepSpec> sweep;
    std::string output_path;  // empty: standard output
    ReportFormat format = ReportFormat::Json;
    std::size_t threads = 1;

    void validate() const {
        if (trials < 1) throw InvalidInput("trials must be >= 1");
        if (threads < 1) throw InvalidInput("threads must be >= 1");
        cfg.validate();
        if (scenario == Scenario::Game && !game) throw InvalidInput("game scenario requires a game spec");
        if (scenario != Scenario::Game && game) throw InvalidInput("game spec given for a non-game scenario");
        if (scenario == Scenario::Establish && cfg.parties != 2) {
            throw InvalidInput("establish is the two-party scenario; use multiparty");
        }
        if (scenario == Scenario::Qsdc) {
            if (cfg.parties != 2) throw InvalidInput("qsdc runs between two parties");
            if (message_bits == 0 || message_bits % 2 != 0) {
                throw InvalidInput("message_bits must be a positive even number");
            }
        }
        if (attack) {
            if (scenario == Scenario::Game) throw InvalidInput("game scenarios take a strategy, not an attack");
            attack->validate(cfg.parties);
            if (attack->kind == AttackKind::Modification && scenario != Scenario::Qsdc) {
                throw InvalidInput("the modification attack targets the QSDC relay; use the qsdc scenario");
            }
        }
        if (sweep) {
            if (sweep->parameter != "n_decoys" && sweep->parameter != "checked") {
                throw InvalidInput("sweep parameter must be n_decoys or checked");
            }
            if (sweep->values.empty()) throw InvalidInput("sweep needs at least one value");
        }
    }
};

// ---------------------------------------------------------------------------
// Config file parsing
// ---------------------------------------------------------------------------

namespace detail {

inline void check_keys(const Json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw InvalidInput(std::string(where) + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw InvalidInput("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

template <class T>
T get(const Json& j, std::string_view where, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string(where) + "." + key + ": " + e.what());
    }
}

}  // namespace detail

inline EstablishmentConfig parse_establishment(const Json& j) {
    detail::check_keys(j, "cfg",
                       {"m_pairs", "n_decoys", "check_fraction", "entanglement_check", "parties", "trojan_filters"});
    EstablishmentConfig c;
    if (j.contains("m_pairs")) c.m_pairs = detail::get<std::size_t>(j, "cfg", "m_pairs");
    if (j.contains("n_decoys")) c.n_decoys = detail::get<std::size_t>(j, "cfg", "n_decoys");
    if (j.contains("check_fraction")) c.check_fraction = detail::get<double>(j, "cfg", "check_fraction");
    if (j.contains("entanglement_check")) c.entanglement_check = detail::get<bool>(j, "cfg", "entanglement_check");
    if (j.contains("parties")) c.parties = detail::get<std::size_t>(j, "cfg", "parties");
    if (j.contains("trojan_filters")) c.trojan_filters = detail::get<bool>(j, "cfg", "trojan_filters");
    return c;
}

inline AttackSpec parse_attack(const Json& j) {
    detail::check_keys(j, "attack",
                       {"kind", "actor", "edge", "unitary", "angles", "unitary_seed", "strategy", "trojan",
                        "variable_state"});
    AttackSpec s = AttackSpec::defaults(parse_attack_kind(detail::get<std::string>(j, "attack", "kind")));
    if (j.contains("actor")) s.actor = PartyId::parse(detail::get<std::string>(j, "attack", "actor"));
    if (j.contains("edge")) {
        const auto e = detail::get<std::vector<std::string>>(j, "attack", "edge");
        if (e.size() != 2) throw InvalidInput("attack.edge must be [from, to]");
        s.target_edge = {PartyId::parse(e[0]), PartyId::parse(e[1])};
    }
    if (j.contains("unitary")) s.unitary = detail::get<std::string>(j, "attack", "unitary");
    if (j.contains("angles")) s.angles = detail::get<std::vector<double>>(j, "attack", "angles");
    if (j.contains("unitary_seed")) s.unitary_seed = detail::get<std::uint64_t>(j, "attack", "unitary_seed");
    if (j.contains("strategy")) {
        s.strategy = parse_modification_strategy(detail::get<std::string>(j, "attack", "strategy"));
        if (s.strategy == ModificationStrategy::Tp2DecoyAware && !j.contains("actor")) s.actor = PartyId::tp2();
    }
    if (j.contains("trojan")) s.trojan = parse_trojan_kind(detail::get<std::string>(j, "attack", "trojan"));
    if (j.contains("variable_state")) s.variable_state = detail::get<bool>(j, "attack", "variable_state");
    return s;
}

inline GameSpec parse_game(const Json& j) {
    detail::check_keys(j, "game", {"discussion", "queries", "strategy"});
    GameSpec g;
    if (j.contains("discussion")) g.discussion = parse_discussion(detail::get<std::string>(j, "game", "discussion"));
    if (j.contains("strategy")) g.strategy = detail::get<std::string>(j, "game", "strategy");
    if (j.contains("queries")) {
        g.queries.clear();
        for (const auto& q : detail::get<std::vector<std::string>>(j, "game", "queries")) {
            g.queries.insert(parse_query(q));
        }
    } else {
        g.queries = make_strategy(g.strategy)->queries();
    }
    return g;
}

inline ExperimentConfig parse_experiment(const Json& j) {
    detail::check_keys(j, "config",
                       {"scenario", "cfg", "attack", "trials", "seed", "message_bits", "game", "sweep", "output",
                        "threads"});
    ExperimentConfig ec;
    if (j.contains("scenario")) ec.scenario = parse_scenario(detail::get<std::string>(j, "config", "scenario"));
    if (j.contains("cfg")) ec.cfg = parse_establishment(j.at("cfg"));
    if (j.contains("attack") && !j.at("attack").is_null()) ec.attack = parse_attack(j.at("attack"));
    if (j.contains("trials")) ec.trials = detail::get<std::size_t>(j, "config", "trials");
    if (j.contains("seed")) ec.seed = detail::get<std::uint64_t>(j, "config", "seed");
    if (j.contains("message_bits")) ec.message_bits = detail::get<std::size_t>(j, "config", "message_bits");
    if (j.contains("game")) ec.game = parse_game(j.at("game"));
    if (j.contains("threads")) ec.threads = detail::get<std::size_t>(j, "config", "threads");
    if (j.contains("sweep")) {
        const Json& s = j.at("sweep");
        detail::check_keys(s, "sweep", {"parameter", "values"});
        SweepSpec sw;
        if (s.contains("parameter")) sw.parameter = detail::get<std::string>(s, "sweep", "parameter");
        sw.values = detail::get<std::vector<std::size_t>>(s, "sweep", "values");
        ec.sweep = std::move(sw);
    }
    if (j.contains("output")) {
        const Json& o = j.at("output");
        detail::check_keys(o, "output", {"path", "format"});
        if (o.contains("path")) ec.output_path = detail::get<std::string>(o, "output", "path");
        if (o.contains("format")) ec.format = parse_format(detail::get<std::string>(o, "output", "format"));
    }
    ec.validate();
    return ec;
}

inline ExperimentConfig parse_experiment_text(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_experiment(j);
}

inline ExperimentConfig load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_text(ss.str());
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct TrialReport {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool detected = false;  // aborted at the attack's oracle step
    bool aborted = false;
    std::size_t step = 0;
    std::string status;
    bool established = false;
    bool delivered = false;
    bool mac_rejected = false;
    bool delivered_wrong = false;
    std::size_t leak_correct = 0;
    std::size_t leak_total = 0;
    bool leakage_flag = false;
    std::string error;  // non-empty when the trial threw
};

struct AggregateReport {
    std::string scenario;
    std::string attack = "none";
    std::size_t n = 0;
    std::size_t c = 0;
    std::size_t m = 0;
    std::size_t parties = 2;
    std::size_t trials = 0;
    std::size_t detected = 0;
    double detection_rate = 0.0;
    std::optional<double> analytic_rate;
    double sigma3 = 0.0;
    bool pass = false;
    std::size_t aborted = 0;
    std::size_t established = 0;
    std::size_t delivered = 0;
    std::size_t mac_rejected = 0;
    std::size_t delivered_wrong = 0;
    std::size_t leakage_flags = 0;
    std::size_t leak_correct = 0;
    std::size_t leak_total = 0;
    double leakage_rate = 0.0;
    std::size_t failed_trials = 0;
    std::uint64_t seed = 0;
    std::optional<GameResult> game;
    std::string game_strategy;
};

/// Binomial three-sigma half-width 3 * sqrt(p (1 - p) / T).
inline double sigma3(double p, std::size_t trials) {
    return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

/// The detection probability the attack should show in this configuration,
/// or nullopt when there is no closed form.
inline std::optional<double> expected_detection(const AttackSpec& spec, const EstablishmentConfig& cfg,
                                                std::size_t payload_pairs) {
    switch (spec.kind) {
        case AttackKind::InterceptResend:
        case AttackKind::CorrelationElicitation:
        case AttackKind::DenseCoding: return analytic_detection(spec, cfg.n_decoys, cfg.checked_count());
        case AttackKind::EntanglementSwap:
            if (spec.variable_state || !cfg.entanglement_check) return 0.0;
            return analytic_detection(spec, cfg.n_decoys, cfg.checked_count());
        case AttackKind::Modification: return modification_detection(spec.strategy, cfg.n_decoys, payload_pairs);
        case AttackKind::TrojanHorse: return cfg.trojan_filters ? 1.0 : 0.0;
        case AttackKind::EntangleMeasure: return std::nullopt;
    }
    return std::nullopt;
}

inline Json to_json(const TrialReport& t) {
    Json j{{"index", t.index},
           {"seed", t.seed},
           {"detected", t.detected},
           {"aborted", t.aborted},
           {"step", t.step},
           {"status", t.status},
           {"leak_correct", t.leak_correct},
           {"leak_total", t.leak_total},
           {"leakage_flag", t.leakage_flag}};
    if (!t.error.empty()) j["error"] = t.error;
    return j;
}

inline Json to_json(const AggregateReport& r) {
    Json j;
    j["scenario"] = r.scenario;
    j["attack"] = r.attack;
    j["n"] = r.n;
    j["c"] = r.c;
    j["m"] = r.m;
    j["parties"] = r.parties;
    j["trials"] = r.trials;
    j["detected"] = r.detected;
    j["detection_rate"] = r.detection_rate;
    j["analytic_rate"] = r.analytic_rate ? Json(*r.analytic_rate) : Json();
    j["sigma3"] = r.sigma3;
    j["pass"] = r.pass;
    j["aborted"] = r.aborted;
    j["aborted_rate"] = static_cast<double>(r.aborted) / static_cast<double>(r.trials);
    j["established"] = r.established;
    j["delivered"] = r.delivered;
    j["mac_rejected"] = r.mac_rejected;
    j["delivered_wrong"] = r.delivered_wrong;
    j["leakage_flags"] = r.leakage_flags;
    j["leak_bits_correct"] = r.leak_correct;
    j["leak_bits_total"] = r.leak_total;
    j["leakage_rate"] = r.leakage_rate;
    j["failed_trials"] = r.failed_trials;
    j["seed"] = r.seed;
    if (r.game) {
        j["game_strategy"] = r.game_strategy;
        j["game"] = to_json(*r.game);
    }
    return j;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

/// Seed of trial i under a master seed.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t i) {
    return Rng(master).split(stream::kTrial + i).seed();
}

/// Runs one trial. Exceptions are captured into the report. The run's
/// transcript is copied to `transcript` when given.
inline TrialReport run_trial(const ExperimentConfig& ec, std::size_t index, Transcript* transcript = nullptr) {
    TrialReport t;
    t.index = index;
    t.seed = trial_seed(ec.seed, index);
    try {
        std::unique_ptr<Adversary> adv;
        if (ec.attack) adv = make_adversary(*ec.attack, ec.cfg.parties);
        Run run(t.seed, Topology::multiparty(ec.cfg.parties), adv.get());
        if (ec.scenario == Scenario::Qsdc) {
            Rng msg_rng = Rng(t.seed).split(stream::kHarness);
            const Message msg = Message::random(ec.message_bits, msg_rng);
            IdealMac mac(Rng(t.seed).split(stream::kMac).seed());
            const QsdcOutcome o = run_qsdc(run, ec.cfg, msg, mac);
            t.status = to_string(o.status);
            t.step = o.detected_step;
            t.aborted = o.detected_step != 0;
            t.established = o.establishment.established();
            t.delivered = o.status == QsdcStatus::Delivered;
            t.mac_rejected = o.status == QsdcStatus::MacRejected;
            t.delivered_wrong = t.delivered && (!o.decoded || *o.decoded != msg);
            if (o.passed_discussions()) {
                t.leak_correct = o.leak_bits_correct;
                t.leak_total = o.leak_bits_total;
            }
        } else {
            const EstablishmentOutcome o =
                ec.scenario == Scenario::Establish ? run_establishment(run, ec.cfg) : run_multiparty(run, ec.cfg);
            t.status = to_string(o.status);
            t.step = o.step;
            t.aborted = o.step != 0;
            t.established = o.established();
        }
        if (transcript) *transcript = run.transcript();
        if (adv) {
            t.leakage_flag = adv->report().leakage_flag;
            t.detected = t.aborted && t.step == oracle_step(*ec.attack);
        } else {
            t.detected = t.aborted;
        }
    } catch (const std::exception& e) {
        t.error = e.what();
    }
    return t;
}

/// Deterministic fold of trial reports in index order.
inline AggregateReport aggregate(const ExperimentConfig& ec, const std::vector<TrialReport>& trials) {
    AggregateReport r;
    r.scenario = std::string(to_string(ec.scenario));
    r.attack = ec.attack ? std::string(to_string(ec.attack->kind)) : "none";
    r.n = ec.cfg.n_decoys;
    r.parties = ec.cfg.parties;
    r.seed = ec.seed;
    r.trials = trials.size();
    std::size_t payload_pairs = ec.cfg.m_pairs;
    EstablishmentConfig sized = ec.cfg;
    if (ec.scenario == Scenario::Qsdc) {
        payload_pairs = ec.message_bits / 2;
        sized.m_pairs = establishment_pairs_for(payload_pairs, ec.cfg);
    }
    r.m = sized.m_pairs;
    r.c = sized.checked_count();
    for (const auto& t : trials) {
        if (!t.error.empty()) {
            ++r.failed_trials;
            continue;
        }
        r.detected += t.detected;
        r.aborted += t.aborted;
        r.established += t.established;
        r.delivered += t.delivered;
        r.mac_rejected += t.mac_rejected;
        r.delivered_wrong += t.delivered_wrong;
        r.leakage_flags += t.leakage_flag;
        r.leak_correct += t.leak_correct;
        r.leak_total += t.leak_total;
    }
    r.detection_rate = static_cast<double>(r.detected) / static_cast<double>(r.trials);
    r.leakage_rate = r.leak_total ? static_cast<double>(r.leak_correct) / static_cast<double>(r.leak_total) : 0.0;
    r.analytic_rate = ec.attack ? expected_detection(*ec.attack, sized, payload_pairs) : std::optional<double>(0.0);
    bool ok = r.failed_trials == 0 && r.delivered_wrong == 0;
    if (r.analytic_rate) {
        r.sigma3 = sigma3(*r.analytic_rate, r.trials);
        ok = ok && std::abs(r.detection_rate - *r.analytic_rate) <= r.sigma3 + 1e-12;
    }
    if (!ec.attack) {
        if (ec.scenario == Scenario::Qsdc) {
            ok = ok && r.delivered == r.trials;
        } else {
            ok = ok && r.established == r.trials;
        }
    }
    r.pass = ok;
    return r;
}

/// Pass rule for a game: passive and fake-state adversaries must stay below
/// 0.05 advantage, the fiat cloner above 0.9; corrupting games are
/// informational and pass when every instance was excluded as stale.
inline bool game_passes(const GameSpec& spec, const GameResult& r) {
    if (spec.strategy == "fiat_clone") return r.advantage > 0.9;
    if (spec.strategy == "corrupting") return r.valid_instances == 0;
    return r.advantage < 0.05;
}

inline AggregateReport run_game_experiment(const ExperimentConfig& ec) {
    AggregateReport r;
    r.scenario = "game";
    r.attack = ec.game->strategy;
    r.n = ec.cfg.n_decoys;
    r.m = ec.cfg.m_pairs;
    r.c = ec.cfg.checked_count();
    r.trials = ec.trials;
    r.seed = ec.seed;
    r.game_strategy = ec.game->strategy;
    try {
        r.game = run_distinguishing_game(*ec.game, ec.cfg, ec.trials, ec.seed);
        r.pass = game_passes(*ec.game, *r.game);
    } catch (const std::exception&) {
        r.failed_trials = ec.trials;
        r.pass = false;
    }
    return r;
}

/// Runs all trials of one configuration point.
inline AggregateReport run_experiment(const ExperimentConfig& ec, std::vector<TrialReport>* keep = nullptr) {
    ec.validate();
    if (ec.scenario == Scenario::Game) return run_game_experiment(ec);
    std::vector<TrialReport> trials(ec.trials);
    const std::size_t workers = std::min(ec.threads, ec.trials);
    if (workers <= 1) {
        for (std::size_t i = 0; i < ec.trials; ++i) trials[i] = run_trial(ec, i);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < ec.trials; i += workers) trials[i] = run_trial(ec, i);
            });
        }
        for (auto& th : pool) th.join();
    }
    AggregateReport r = aggregate(ec, trials);
    if (keep) *keep = std::move(trials);
    return r;
}

/// The configuration at one sweep point.
inline ExperimentConfig sweep_point(const ExperimentConfig& ec, std::size_t value) {
    ExperimentConfig p = ec;
    p.sweep.reset();
    if (ec.sweep->parameter == "n_decoys") {
        p.cfg.n_decoys = value;
    } else {
        if (value < 1 || value >= ec.cfg.m_pairs) {
            throw InvalidInput("checked count must lie in [1, m_pairs)");
        }
        p.cfg.check_fraction = static_cast<double>(value) / static_cast<double>(ec.cfg.m_pairs);
        if (p.cfg.checked_count() != value) throw InvalidInput("cannot realise checked count exactly");
    }
    return p;
}

/// One report per sweep point, or a single report without a sweep.
inline std::vector<AggregateReport> run_sweep(const ExperimentConfig& ec) {
    ec.validate();
    if (!ec.sweep) return {run_experiment(ec)};
    std::vector<AggregateReport> out;
    for (auto v : ec.sweep->values) {
        out.push_back(run_experiment(sweep_point(ec, v)));
    }
    return out;
}

inline bool all_pass(const std::vector<AggregateReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

inline std::string csv_header() {
    return "scenario,attack,n,c,trials,detected,detection_rate,analytic_rate,sigma3,pass,leakage_rate,seed";
}

inline std::string csv_number(double v) {
    return Json(v).dump();
}

inline std::string csv_row(const AggregateReport& r) {
    std::string s = r.scenario + "," + r.attack + "," + std::to_string(r.n) + "," + std::to_string(r.c) + "," +
                    std::to_string(r.trials) + "," + std::to_string(r.detected) + "," + csv_number(r.detection_rate) +
                    "," + (r.analytic_rate ? csv_number(*r.analytic_rate) : "") + "," + csv_number(r.sigma3) + "," +
                    (r.pass ? "true" : "false") + "," + csv_number(r.leakage_rate) + "," + std::to_string(r.seed);
    return s;
}

/// Serialises reports; byte-identical for identical inputs.
inline std::string render_report(const std::vector<AggregateReport>& reports, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        std::string s = csv_header() + "\n";
        for (const auto& r : reports) s += csv_row(r) + "\n";
        return s;
    }
    Json j;
    j["pass"] = all_pass(reports);
    Json points = Json::array();
    for (const auto& r : reports) points.push_back(to_json(r));
    j["points"] = std::move(points);
    return j.dump(2) + "\n";
}

inline void emit_report(const std::vector<AggregateReport>& reports, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write report to '" + path + "'");
    out << render_report(reports, format);
    if (!out) throw InvalidInput("failed writing report to '" + path + "'");
}

}  // namespace qee
