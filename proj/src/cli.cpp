#include "cosvar/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cosvar/dataio.hpp"
#include "cosvar/moments.hpp"
#include "cosvar/optimize.hpp"
#include "cosvar/power.hpp"
#include "cosvar/simulate.hpp"
#include "cosvar/svg.hpp"

namespace cosvar {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MomentsArgs {
    int which = 0;
    std::optional<std::size_t> dim;
    std::string spectrum_file;
    std::string means_file;
};

struct OptimizeArgs {
    std::string etas_file;
    double scale = 1.0;
    bool verify = false;
};

struct PowerArgs {
    std::string class_file;
    std::string bg_file;
    std::string spectrum_file;
    double alpha = 0.05;
};

struct SimulateArgs {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<std::size_t> dims;
    std::optional<std::size_t> vectors;
    std::string out_file;
    std::string svg_file;
    unsigned threads = 0;
    std::optional<std::size_t> spectra_per_dim;
    std::size_t repeats = 1;
    std::size_t draws = 20;
    std::size_t draws_per_spectrum = 5;
    std::string spectrum = "gamma";
    double mean_variance = 2.0;
};

struct AnalyzeArgs {
    std::string input;
    bool pearson_mode = false;
    std::string components_file;
};

struct TransformArgs {
    std::string input;
    std::string out_file;
    bool pearson_mode = false;
};

void write_key_values(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
    out << "quantity,value\n";
    for (const auto& [k, v] : kv) out << k << ',' << v << '\n';
}

Spectrum spectrum_or_isotropic(const std::string& file, std::optional<std::size_t> dim) {
    if (file.empty()) {
        if (!dim) throw UsageError("--dim is required when no --spectrum file is given");
        return Spectrum::isotropic(*dim);
    }
    Spectrum s(load_vector_csv(file));
    if (dim && *dim != s.size()) {
        throw std::invalid_argument("--dim " + std::to_string(*dim) + " disagrees with spectrum length " +
                                    std::to_string(s.size()));
    }
    return s;
}

int cmd_moments(const MomentsArgs& a, std::ostream& out) {
    CosineMoments m;
    switch (a.which) {
        case 1:
            if (!a.dim) throw UsageError("moments --case 1 requires --dim");
            m = case1_moments(*a.dim);
            break;
        case 2:
            m = case2_variance(spectrum_or_isotropic(a.spectrum_file, a.dim));
            break;
        case 3: {
            Spectrum s = spectrum_or_isotropic(a.spectrum_file, a.dim);
            std::vector<double> means =
                a.means_file.empty() ? std::vector<double>(s.size(), 0.0) : load_vector_csv(a.means_file);
            m = case3_moments(GaussianModel(std::move(means), std::move(s)));
            break;
        }
        default:
            throw UsageError("--case must be 1, 2 or 3");
    }
    out << "mean,variance\n" << format_double(m.mean) << ',' << format_double(m.variance) << '\n';
    return 0;
}

int cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
    const DimensionlessMeans etas(load_vector_csv(a.etas_file));
    const OptimalSpectrum opt = optimal_spectrum(etas, a.scale);
    out << "# min_variance," << format_double(min_variance(etas)) << '\n';
    if (a.verify) {
        const MinimizerResult num = numerical_min_case3(etas, {.tol = 1e-10});
        const std::vector<double> closed = project_to_gauge(etas, opt.eigenvalues);
        double gap = 0.0;
        for (std::size_t i = 0; i < closed.size(); ++i) gap = std::max(gap, std::fabs(closed[i] - num.spectrum[i]));
        out << "# numerical_max_gap," << format_double(gap) << '\n';
        out << "# numerical_iterations," << num.iterations << '\n';
    }
    out << "index,eta,weight,eigenvalue\n";
    for (std::size_t i = 0; i < opt.eigenvalues.size(); ++i) {
        out << i << ',' << format_double(opt.etas[i]) << ',' << format_double(opt.weights[i]) << ','
            << format_double(opt.eigenvalues[i]) << '\n';
    }
    return 0;
}

int cmd_power(const PowerArgs& a, std::ostream& out) {
    const PowerSpec spec(DimensionlessMeans(load_vector_csv(a.class_file)), DimensionlessMeans(load_vector_csv(a.bg_file)),
                         Spectrum(load_vector_csv(a.spectrum_file)), a.alpha);
    const PowerReport r = evaluate_power(spec);
    out << "tau,delta,power\n"
        << format_double(r.tau) << ',' << format_double(r.delta) << ',' << format_double(r.power) << '\n';
    return 0;
}

void write_experiment(std::ostream& out, const ExperimentResult& result) {
    out << "dimension,theory_mean,empirical_mean,theory_variance,empirical_variance,num_pairs,seed\n";
    for (const auto& r : result.rows) {
        out << r.dimension << ',' << format_double(r.theory_mean) << ',' << format_double(r.empirical_mean) << ','
            << format_double(r.theory_variance) << ',' << format_double(r.empirical_variance) << ',' << r.num_pairs << ','
            << r.seed << '\n';
    }
    if (result.pearson_variance) out << "# pearson_variance," << format_double(*result.pearson_variance) << '\n';
    if (result.pearson_mean) out << "# pearson_mean," << format_double(*result.pearson_mean) << '\n';
}

void write_norm_rows(std::ostream& out, const std::vector<NormRow>& rows) {
    out << "dimension,draw,jensen_bound,mean_norm,sd_norm,ratio_to_bound,sd_over_mean,num_vectors,seed\n";
    for (const auto& r : rows) {
        out << r.dimension << ',' << r.draw << ',' << format_double(r.jensen_bound) << ',' << format_double(r.mean_norm)
            << ',' << format_double(r.sd_norm) << ',' << format_double(r.ratio_to_bound) << ','
            << format_double(r.sd_over_mean) << ',' << r.num_vectors << ',' << r.seed << '\n';
    }
}

SpectrumSource parse_spectrum_source(const std::string& name) {
    if (name == "gamma") return GammaHyper{};
    if (name == "isotropic") return Isotropic{};
    throw UsageError("--spectrum must be gamma or isotropic");
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const Workers workers{a.threads};
    std::ostringstream csv;
    ScatterPlot plot;
    plot.x_label = "theoretical variance";
    plot.y_label = "empirical variance";

    if (a.experiment == "case1" || a.experiment == "case2" || a.experiment == "case3") {
        ExperimentResult result;
        if (a.experiment == "case1") {
            const auto dims = a.dims.empty() ? log_spaced_dims(1, 1000, 20) : a.dims;
            result = run_case1_experiment(dims, a.vectors.value_or(1000), a.seed, workers);
        } else {
            SweepOptions opts;
            opts.dims = a.dims.empty() ? linear_dims(100, 1000, 100) : a.dims;
            opts.num_vectors = a.vectors.value_or(1000);
            opts.spectra_per_dim = a.spectra_per_dim.value_or(a.experiment == "case2" ? 3 : 10);
            opts.repeats = a.repeats;
            opts.seed = a.seed;
            opts.spectrum_source = parse_spectrum_source(a.spectrum);
            if (a.mean_variance > 0.0) {
                opts.mean_source = NormalMeans{a.mean_variance};
            } else {
                opts.mean_source = ZeroMeans{};
            }
            result = a.experiment == "case2" ? run_case2_experiment(opts, workers) : run_case3_experiment(opts, workers);
        }
        write_experiment(csv, result);
        plot.title = a.experiment + ": cosine variance, theory vs simulation";
        for (const auto& r : result.rows) {
            plot.xs.push_back(r.theory_variance);
            plot.ys.push_back(r.empirical_variance);
        }
    } else if (a.experiment == "norm") {
        NormOptions opts;
        opts.dims = a.dims.empty() ? std::vector<std::size_t>{10, 30, 100, 300, 1000} : a.dims;
        opts.vectors_per_draw = a.vectors.value_or(100);
        opts.draws = a.draws;
        opts.draws_per_spectrum = a.draws_per_spectrum;
        opts.seed = a.seed;
        opts.spectrum_source = parse_spectrum_source(a.spectrum);
        const auto rows = run_norm_experiment(opts, workers);
        write_norm_rows(csv, rows);
        plot.title = "norm: Jensen bound vs observed mean norm";
        plot.x_label = "sqrt(E|X|^2)";
        plot.y_label = "mean |X|";
        for (const auto& r : rows) {
            plot.xs.push_back(r.jensen_bound);
            plot.ys.push_back(r.mean_norm);
        }
    } else {
        throw UsageError("--experiment must be one of case1, case2, case3, norm");
    }

    if (a.out_file.empty()) {
        out << csv.str();
    } else {
        std::ofstream f(a.out_file, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + a.out_file);
        f << csv.str();
    }
    if (!a.svg_file.empty()) {
        std::ofstream f(a.svg_file, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + a.svg_file);
        f << render_svg(plot);
    }
    return 0;
}

DataMatrix load_input(const std::string& path, bool pearson_mode) {
    DataMatrix data = load_csv(path);
    return pearson_mode ? center_rows(data) : data;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const DataMatrix data = load_input(a.input, a.pearson_mode);
    const EstimatedModel model = estimate_model(data);
    const GaussianModel retained = model.retained_model();
    const CosineMoments null_moments = case3_moments(retained);
    const double best = min_variance(model.retained_etas());

    write_key_values(out, {
                              {"rows", std::to_string(data.rows())},
                              {"cols", std::to_string(data.cols())},
                              {"retained_components", std::to_string(model.retained())},
                              {"floored_components", std::to_string(model.eigenvalues.size() - model.retained())},
                              {"eigenvalue_floor", format_double(model.floor)},
                              {"predicted_mean", format_double(null_moments.mean)},
                              {"predicted_variance", format_double(null_moments.variance)},
                              {"optimal_transform_variance", format_double(best)},
                          });

    if (!a.components_file.empty()) {
        std::ofstream f(a.components_file, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + a.components_file);
        f << "component,eigenvalue,eta,floored\n";
        for (std::size_t k = 0; k < model.eigenvalues.size(); ++k) {
            f << k << ',' << format_double(model.eigenvalues[k]) << ',' << format_double(model.etas[k]) << ','
              << (model.floored[k] ? 1 : 0) << '\n';
        }
    }
    return 0;
}

int cmd_transform(const TransformArgs& a, std::ostream& out) {
    const DataMatrix data = load_input(a.input, a.pearson_mode);
    const EstimatedModel model = estimate_model(data);
    const Matrix w = optimal_transform(model);
    std::ofstream f(a.out_file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + a.out_file);
    write_csv(f, w, data.column_names);
    write_key_values(out, {
                              {"dimension", std::to_string(w.rows())},
                              {"predicted_variance_before", format_double(case3_moments(model.retained_model()).variance)},
                              {"predicted_variance_after", format_double(min_variance(model.retained_etas()))},
                          });
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Moments, optimal spectra and power models for cosine similarity", "cosvar"};
    app.require_subcommand(1);

    MomentsArgs moments;
    auto* sub_moments = app.add_subcommand("moments", "Cosine mean and variance for case 1, 2 or 3");
    sub_moments->add_option("--case", moments.which, "1 isotropic, 2 centered, 3 general")->required();
    sub_moments->add_option("--dim", moments.dim, "Dimension");
    sub_moments->add_option("--spectrum", moments.spectrum_file, "CSV of covariance eigenvalues");
    sub_moments->add_option("--means", moments.means_file, "CSV of per-axis means (case 3)");

    OptimizeArgs optimize;
    auto* sub_optimize = app.add_subcommand("optimize", "Variance-minimizing spectrum for dimensionless means");
    sub_optimize->add_option("--etas", optimize.etas_file, "CSV of dimensionless means")->required();
    sub_optimize->add_option("--scale", optimize.scale, "Scale constant C");
    sub_optimize->add_flag("--verify", optimize.verify, "Cross-check against projected-gradient descent");

    PowerArgs power;
    auto* sub_power = app.add_subcommand("power", "Threshold, separation and power for class vs background");
    sub_power->add_option("--class-etas", power.class_file, "CSV of class dimensionless means")->required();
    sub_power->add_option("--bg-etas", power.bg_file, "CSV of background dimensionless means")->required();
    sub_power->add_option("--spectrum", power.spectrum_file, "CSV of shared covariance eigenvalues")->required();
    sub_power->add_option("--alpha", power.alpha, "Significance level")->required();

    SimulateArgs simulate;
    auto* sub_simulate = app.add_subcommand("simulate", "Monte Carlo experiments with deterministic seeding");
    sub_simulate->add_option("--experiment", simulate.experiment, "case1, case2, case3 or norm")->required();
    sub_simulate->add_option("--seed", simulate.seed, "Root seed")->required();
    sub_simulate->add_option("--dims", simulate.dims, "Comma-separated dimensions")->delimiter(',');
    sub_simulate->add_option("--vectors", simulate.vectors, "Vectors per sample");
    sub_simulate->add_option("--out", simulate.out_file, "Write CSV here instead of stdout");
    sub_simulate->add_option("--svg", simulate.svg_file, "Write a theory-vs-empirical scatter plot");
    sub_simulate->add_option("--threads", simulate.threads, "Worker threads (0 = all cores); output does not depend on it");
    sub_simulate->add_option("--spectra-per-dim", simulate.spectra_per_dim, "Spectra drawn per dimension");
    sub_simulate->add_option("--repeats", simulate.repeats, "Samples per spectrum");
    sub_simulate->add_option("--draws", simulate.draws, "Draws per dimension (norm)");
    sub_simulate->add_option("--draws-per-spectrum", simulate.draws_per_spectrum, "Draws sharing one spectrum (norm)");
    sub_simulate->add_option("--spectrum", simulate.spectrum, "gamma or isotropic");
    sub_simulate->add_option("--mean-variance", simulate.mean_variance, "Variance of the normal mean draw (case3)");

    AnalyzeArgs analyze;
    auto* sub_analyze = app.add_subcommand("analyze", "Estimate the eigen-model of a dataset and its null cosine moments");
    sub_analyze->add_option("--input", analyze.input, "CSV, rows are samples")->required();
    sub_analyze->add_flag("--pearson-mode", analyze.pearson_mode, "Center each row first (Pearson correlation)");
    sub_analyze->add_option("--components", analyze.components_file, "Write per-component eigenvalues and etas");

    TransformArgs transform;
    auto* sub_transform = app.add_subcommand("transform", "Write the variance-minimizing linear transform");
    sub_transform->add_option("--input", transform.input, "CSV, rows are samples")->required();
    sub_transform->add_option("--out", transform.out_file, "Output CSV for W")->required();
    sub_transform->add_flag("--pearson-mode", transform.pearson_mode, "Center each row first");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (sub_moments->parsed()) return cmd_moments(moments, out);
        if (sub_optimize->parsed()) return cmd_optimize(optimize, out);
        if (sub_power->parsed()) return cmd_power(power, out);
        if (sub_simulate->parsed()) return cmd_simulate(simulate, out);
        if (sub_analyze->parsed()) return cmd_analyze(analyze, out);
        if (sub_transform->parsed()) return cmd_transform(transform, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    err << app.help();
    return 2;
}

}  // namespace cosvar
