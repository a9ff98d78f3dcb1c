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


#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qee/qee.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::string attack;
    std::string out;
    std::string format;
    std::string transcript;
    std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "Experiment config file (JSON)");
    cmd->add_option("--seed", f.seed, "Master seed");
    cmd->add_option("--trials", f.trials, "Number of trials or game instances");
    cmd->add_option("--attack", f.attack, "Attack kind (uses its default actor and edge)");
    cmd->add_option("--out", f.out, "Report path (default: standard output)");
    cmd->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--transcript", f.transcript, "Write the first trial's transcript as JSON lines");
    cmd->add_option("--threads", f.threads, "Worker threads");
}

qee::ExperimentConfig build_config(const Flags& f, std::optional<qee::Scenario> scenario) {
    qee::ExperimentConfig ec;
    if (!f.config.empty()) {
        ec = qee::load_experiment(f.config);
        if (scenario && ec.scenario != *scenario) {
            std::ifstream in(f.config);
            const auto j = qee::Json::parse(in);
            if (j.contains("scenario")) {
                throw qee::InvalidInput("config scenario '" + std::string(qee::to_string(ec.scenario)) +
                                        "' does not match the subcommand");
            }
        }
    }
    if (scenario) {
        ec.scenario = *scenario;
        if (*scenario == qee::Scenario::Multiparty && f.config.empty()) ec.cfg.parties = 3;
        if (*scenario == qee::Scenario::Game && !ec.game) ec.game = qee::GameSpec{};
    }
    if (f.seed) ec.seed = *f.seed;
    if (f.trials) ec.trials = *f.trials;
    if (f.threads) ec.threads = *f.threads;
    if (!f.attack.empty()) {
        ec.attack = f.attack == "none" ? std::nullopt
                                       : std::optional(qee::AttackSpec::defaults(qee::parse_attack_kind(f.attack)));
    }
    if (!f.out.empty()) ec.output_path = f.out;
    if (!f.format.empty()) ec.format = qee::parse_format(f.format);
    ec.validate();
    return ec;
}

int execute(const qee::ExperimentConfig& ec, const Flags& f) {
    const auto reports = qee::run_sweep(ec);
    if (!f.transcript.empty() && ec.scenario != qee::Scenario::Game) {
        qee::Transcript t;
        const auto first = ec.sweep ? qee::sweep_point(ec, ec.sweep->values.front()) : ec;
        (void)qee::run_trial(first, 0, &t);
        std::ofstream out(f.transcript, std::ios::binary);
        if (!out) throw qee::InvalidInput("cannot write transcript to '" + f.transcript + "'");
        out << t.to_jsonl();
    }
    if (ec.output_path.empty()) {
        std::cout << qee::render_report(reports, ec.format);
    } else {
        qee::emit_report(reports, ec.format, ec.output_path);
    }
    return qee::all_pass(reports) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qee: two-TP entanglement establishment and QSDC simulator"};
    app.require_subcommand(1);

    Flags flags;
    struct Sub {
        const char* name;
        const char* help;
        std::optional<qee::Scenario> scenario;
    };
    const Sub subs[] = {
        {"establish", "Two-party entanglement establishment", qee::Scenario::Establish},
        {"qsdc", "Direct communication over established pairs", qee::Scenario::Qsdc},
        {"multiparty", "k-party GHZ establishment", qee::Scenario::Multiparty},
        {"game", "Distinguishing game on a public discussion", qee::Scenario::Game},
        {"sweep", "Vary n_decoys or checked over the config's sweep list", std::nullopt},
    };
    for (const auto& s : subs) {
        add_common(app.add_subcommand(s.name, s.help), flags);
    }
    std::uint64_t selftest_seed = 1;
    auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");
    selftest->add_option("--seed", selftest_seed, "Seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (selftest->parsed()) {
            bool ok = true;
            for (const auto& c : qee::run_selftest(selftest_seed)) {
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
                if (!c.detail.empty()) std::cout << "  " << c.detail;
                std::cout << "\n";
                ok = ok && c.pass;
            }
            return ok ? 0 : 1;
        }
        for (const auto& s : subs) {
            if (app.got_subcommand(s.name)) {
                const auto ec = build_config(flags, s.scenario);
                if (!s.scenario && !ec.sweep) throw qee::InvalidInput("sweep needs a config with a sweep section");
                return execute(ec, flags);
            }
        }
    } catch (const qee::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
