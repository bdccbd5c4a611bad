#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "csv.hpp"
#include "igflow/discrete_flow.hpp"
#include "igflow/error.hpp"
#include "igflow/gradient_flow.hpp"
#include "igflow/hamilton_flow.hpp"
#include "igflow/models.hpp"
#include "igflow/verification.hpp"

namespace igflow::cli {

namespace {

Vector to_vector(const std::vector<double>& xs) {
    return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

Span parse_span(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("span must look like start:end, got " + text);
    try {
        std::size_t a = 0, b = 0;
        const std::string lo = text.substr(0, colon), hi = text.substr(colon + 1);
        Span span{std::stod(lo, &a), std::stod(hi, &b)};
        if (a != lo.size() || b != hi.size()) throw std::invalid_argument(text);
        return span;
    } catch (const std::exception&) {
        throw ConfigError("span must look like start:end, got " + text);
    }
}

void emit(const std::string& content, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << content;
    else
        write_atomically(path, content);
}

struct SimulateArgs {
    std::string kind;
    std::string model_path;
    std::vector<double> q0, p0, q2;
    std::string span = "0:1";
    std::string out;
    double step = 1e-3;
    double output_step = 0.01;
    std::string method = "rk4";
    std::vector<double> at;
};

IntegratorConfig make_config(const SimulateArgs& a) {
    IntegratorConfig cfg;
    if (a.method == "rk4")
        cfg.method = Method::rk4;
    else if (a.method == "rk45")
        cfg.method = Method::rk45;
    else
        throw ConfigError("method must be rk4 or rk45, got " + a.method);
    cfg.step = a.step;
    cfg.max_step = std::max(cfg.max_step, a.step);
    cfg.output_step = a.output_step;
    cfg.extra_outputs = a.at;
    cfg.validate();
    return cfg;
}

std::string trajectory_csv(const Trajectory& traj) {
    CsvTable table;
    const int n = traj.samples.empty() ? 0 : static_cast<int>(traj.front().state.dim());
    table.header.push_back(parameter_name(traj.kind));
    for (int i = 1; i <= n; ++i) table.header.push_back("q" + std::to_string(i));
    for (int i = 1; i <= n; ++i) table.header.push_back("p" + std::to_string(i));
    for (const auto& s : traj.samples) {
        std::vector<double> row{s.param};
        row.insert(row.end(), s.state.q.data(), s.state.q.data() + n);
        row.insert(row.end(), s.state.p.data(), s.state.p.data() + n);
        table.rows.push_back(std::move(row));
    }
    return table.to_string();
}

std::string discrete_csv(const std::vector<DiscreteSample>& samples, int n) {
    CsvTable table;
    table.header.push_back("t");
    for (int i = 1; i <= n; ++i) table.header.push_back("q" + std::to_string(i));
    table.header.push_back("D");
    for (const auto& s : samples) {
        std::vector<double> row{s.t};
        row.insert(row.end(), s.q.data(), s.q.data() + n);
        row.push_back(s.divergence);
        table.rows.push_back(std::move(row));
    }
    return table.to_string();
}

int simulate(const SimulateArgs& a, std::ostream& out) {
    const Span span = parse_span(a.span);
    const IntegratorConfig cfg = make_config(a);

    if (a.kind == "discrete") {
        if (a.q0.empty() || a.q2.empty()) throw ConfigError("discrete simulation needs --q0 and --q2");
        const FlowEndpoints ep{to_vector(a.q0), to_vector(a.q2)};
        try {
            ep.validate();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        if (span.end < span.start) throw ConfigError("t span must satisfy start <= end");
        const auto samples = integrate_discrete_flow(ep, span, cfg);
        emit(discrete_csv(samples, static_cast<int>(ep.q0.size())), a.out, out);
        return kOk;
    }

    if (a.model_path.empty()) throw ConfigError(a.kind + " simulation needs --model");
    const VielbeinModel model = load_model_config(a.model_path);
    const Vector q0 = a.q0.empty() ? model.reference_state() : to_vector(a.q0);
    if (q0.size() != model.dim())
        throw ConfigError("--q0 has " + std::to_string(q0.size()) + " entries, model dimension is " +
                          std::to_string(model.dim()));
    try {
        model.require_admissible(q0);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    Trajectory traj;
    if (a.kind == "hamilton") {
        PhaseState start = on_shell_state(model, q0);
        if (!a.p0.empty()) {
            if (static_cast<int>(a.p0.size()) != model.dim())
                throw ConfigError("--p0 must have one entry per coordinate");
            start.p = to_vector(a.p0);
        }
        if (span.end < span.start) throw ConfigError("tau span must satisfy start <= end");
        traj = integrate_hamilton(make_system(model), start, span, cfg);
    } else if (a.kind == "gradient") {
        if (!a.p0.empty()) throw ConfigError("--p0 does not apply to gradient flows");
        traj = integrate_gradient_flow(model, q0, span, cfg);
    } else {
        throw ConfigError("unknown simulation kind " + a.kind);
    }
    emit(trajectory_csv(traj), a.out, out);
    return kOk;
}

struct VerifyArgs {
    std::string model_path;
    std::string suite = "all";
    std::string tolerances;
    std::vector<double> q0;
    std::uint64_t seed = 20200818;
    std::string out;
};

int verify(const VerifyArgs& a, std::ostream& out) {
    VerifyOptions options;
    options.suite = parse_suite(a.suite);
    options.seed = a.seed;
    std::string tol_path = a.tolerances;
    if (const char* env = std::getenv("IGFLOW_TOLERANCES"); env && *env) tol_path = env;
    if (!tol_path.empty()) options.tolerances.load_file(tol_path);

    const VielbeinModel model = load_model_config(a.model_path);
    if (!a.q0.empty()) {
        options.q0 = to_vector(a.q0);
        if (options.q0->size() != model.dim()) throw ConfigError("--q0 does not match the model dimension");
        try {
            model.require_admissible(*options.q0);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
    const VerificationReport report = run_verification(make_system(model), options);
    emit(report.to_json(), a.out, out);
    return report.all_passed() ? kOk : kChecksFailed;
}

struct ExportArgs {
    std::string traj;
    std::string model_path;
    std::string quantities;
    std::vector<double> q2;
    std::string out;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) items.push_back(item);
    return items;
}

int export_plotdata(const ExportArgs& a, std::ostream& out) {
    static const std::vector<std::string> known{"s", "T", "P", "H", "D", "eikonal"};
    const auto quantities = split_list(a.quantities);
    for (const auto& q : quantities)
        if (std::find(known.begin(), known.end(), q) == known.end())
            throw ConfigError("unknown quantity \"" + q + "\" (known: s, T, P, H, D, eikonal)");

    const std::string text = read_file(a.traj);
    if (quantities.empty()) {
        emit(text, a.out, out);
        return kOk;
    }

    CsvTable table = parse_csv(text);
    if (table.header.empty() || (table.header[0] != "tau" && table.header[0] != "t"))
        throw ConfigError("first column of a trajectory must be tau or t");
    std::vector<int> qcols, pcols;
    for (int i = 1;; ++i) {
        const int c = table.column("q" + std::to_string(i));
        if (c < 0) break;
        qcols.push_back(c);
    }
    for (int i = 1;; ++i) {
        const int c = table.column("p" + std::to_string(i));
        if (c < 0) break;
        pcols.push_back(c);
    }
    if (qcols.empty()) throw ConfigError("trajectory has no q columns");
    const bool has_p = pcols.size() == qcols.size();

    std::optional<VielbeinModel> model;
    if (!a.model_path.empty()) model = load_model_config(a.model_path);
    auto need_model = [&](const std::string& q) -> const VielbeinModel& {
        if (!model) throw ConfigError("quantity " + q + " needs --model");
        if (model->dim() != static_cast<int>(qcols.size()))
            throw ConfigError("model dimension does not match the trajectory");
        return *model;
    };
    auto need_p = [&](const std::string& q) {
        if (!has_p) throw ConfigError("quantity " + q + " needs momentum columns p1..pN");
    };

    for (const auto& name : quantities) {
        if (name == "s" || name == "H" || name == "eikonal") need_model(name);
        if (name == "T" || name == "P" || name == "H" || name == "eikonal") need_p(name);
        if ((name == "T" || name == "P") && pcols.size() < (name == "P" ? 2u : 1u))
            throw ConfigError("quantity " + name + " needs a gas trajectory");
        if (name == "D" && a.q2.size() != qcols.size())
            throw ConfigError("quantity D needs --q2 with one entry per q column");
        table.header.push_back(name);
    }

    for (auto& row : table.rows) {
        Vector q(static_cast<Eigen::Index>(qcols.size())), p;
        for (std::size_t i = 0; i < qcols.size(); ++i) q[static_cast<Eigen::Index>(i)] = row[qcols[i]];
        if (has_p) {
            p.resize(q.size());
            for (std::size_t i = 0; i < pcols.size(); ++i) p[static_cast<Eigen::Index>(i)] = row[pcols[i]];
        }
        std::vector<double> extra;
        for (const auto& name : quantities) {
            if (name == "s") {
                extra.push_back(model->entropy(q));
            } else if (name == "T") {
                extra.push_back(1.0 / p[0]);
            } else if (name == "P") {
                extra.push_back(p[1] / p[0]);
            } else if (name == "H") {
                extra.push_back(std::sqrt(p.dot(model->metric(q).g_inv * p)));
            } else if (name == "eikonal") {
                extra.push_back(eikonal_residual(model->metric(q).g_inv, p, model->energy()));
            } else if (name == "D") {
                extra.push_back(kl_divergence(q, to_vector(a.q2)));
            }
        }
        row.insert(row.end(), extra.begin(), extra.end());
    }
    emit(table.to_string(), a.out, out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Vielbein thermodynamic flows: simulate, verify and export trajectories", "igflow"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Integrate a Hamilton, gradient or discrete KL flow");
    sim_cmd->add_option("kind", sim.kind, "hamilton | gradient | discrete")
        ->required()
        ->check(CLI::IsMember({"hamilton", "gradient", "discrete"}));
    sim_cmd->add_option("--model", sim.model_path, "Model configuration JSON");
    sim_cmd->add_option("--q0", sim.q0, "Initial coordinates, comma separated")->delimiter(',');
    sim_cmd->add_option("--p0", sim.p0, "Initial momenta (Hamilton flow; default on shell)")->delimiter(',');
    sim_cmd->add_option("--q2", sim.q2, "Target distribution for the discrete flow")->delimiter(',');
    sim_cmd->add_option("--span", sim.span, "Parameter interval start:end")->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "Output CSV (default: standard output)");
    sim_cmd->add_option("--step", sim.step, "RK4 step / initial RK45 step")->capture_default_str();
    sim_cmd->add_option("--output-step", sim.output_step, "Spacing of output rows")->capture_default_str();
    sim_cmd->add_option("--method", sim.method, "rk4 | rk45")->capture_default_str();
    sim_cmd->add_option("--at", sim.at, "Extra output parameters, comma separated")->delimiter(',');

    VerifyArgs ver;
    auto* ver_cmd = app.add_subcommand("verify", "Run the invariant checks and print a JSON report");
    ver_cmd->add_option("--model", ver.model_path, "Model configuration JSON")->required();
    ver_cmd->add_option("--suite", ver.suite, "all | geometry | flows | discrete")->capture_default_str();
    ver_cmd->add_option("--tolerances", ver.tolerances,
                        "JSON object of tolerance overrides (IGFLOW_TOLERANCES takes precedence)");
    ver_cmd->add_option("--q0", ver.q0, "Start of the checked flows")->delimiter(',');
    ver_cmd->add_option("--seed", ver.seed, "Seed for randomized checks")->capture_default_str();
    ver_cmd->add_option("--out", ver.out, "Write the report here instead of standard output");

    ExportArgs exp;
    auto* exp_cmd = app.add_subcommand("export-plotdata", "Append derived columns to a trajectory CSV");
    exp_cmd->add_option("--traj", exp.traj, "Trajectory CSV from simulate")->required();
    exp_cmd->add_option("--model", exp.model_path, "Model configuration JSON");
    exp_cmd->add_option("--quantities", exp.quantities, "Comma-separated list of s,T,P,H,D,eikonal");
    exp_cmd->add_option("--q2", exp.q2, "Reference distribution for D")->delimiter(',');
    exp_cmd->add_option("--out", exp.out, "Output CSV (default: standard output)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "igflow: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (sim_cmd->parsed()) return simulate(sim, out);
        if (ver_cmd->parsed()) return verify(ver, out);
        return export_plotdata(exp, out);
    } catch (const IntegrationError& e) {
        err << "igflow: integration failed: " << e.what() << " (last good sample at " << e.last_param()
            << ", state " << describe(e.last_state()) << ")\n";
        return kIntegrationFailure;
    } catch (const std::exception& e) {
        err << "igflow: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace igflow::cli
