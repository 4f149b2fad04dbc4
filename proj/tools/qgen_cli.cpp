#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgen/datasets.hpp"
#include "qgen/experiment.hpp"
#include "qgen/metrics.hpp"
#include "qgen/resources.hpp"
#include "qgen/transforms.hpp"

namespace {

using nlohmann::json;

int cmd_gen_data(const std::string& name, int dim, std::int64_t n, std::uint64_t seed,
                 const std::vector<std::string>& csv_paths, const std::string& out_prefix) {
    qgen::RawDataset ds;
    const qgen::DatasetName dname = qgen::dataset_name_from_str(name);
    switch (dname) {
    case qgen::DatasetName::MixedGaussian:
        ds = qgen::gen_mixed_gaussian(dim, n, seed);
        break;
    case qgen::DatasetName::X:
        ds = qgen::gen_x(dim, n, seed);
        break;
    case qgen::DatasetName::O:
        ds = qgen::gen_o(dim, n, seed);
        break;
    case qgen::DatasetName::Stocks:
        ds = qgen::load_stocks(csv_paths);
        break;
    }
    qgen::write_points_csv(out_prefix + ".csv", ds.points);
    json meta = ds.metadata;
    meta["name"] = qgen::dataset_name_str(ds.name);
    meta["dim"] = ds.dim;
    meta["rows"] = ds.points.rows;
    qgen::atomic_write_file(out_prefix + ".meta.json", meta.dump(2) + "\n");
    std::cout << "wrote " << ds.points.rows << " points to " << out_prefix << ".csv\n";
    return 0;
}

int cmd_transform(const std::string& kind, const std::string& data_path,
                  const std::string& out_prefix) {
    const qgen::Matrix points = qgen::read_points_csv(data_path);
    const qgen::TransformModel model =
        qgen::TransformModel::fit(qgen::transform_kind_from_name(kind), points);
    qgen::write_points_csv(out_prefix + ".csv", model.forward(points));
    qgen::atomic_write_file(out_prefix + ".model.json", model.to_json().dump() + "\n");
    std::cout << "wrote transformed points to " << out_prefix << ".csv\n";
    return 0;
}

int cmd_train(const std::string& spec_path, const std::string& out_dir_override) {
    std::ifstream in(spec_path);
    if (!in) {
        std::cerr << "error: cannot open spec file: " << spec_path << "\n";
        return 1;
    }
    json j;
    in >> j;
    qgen::ExperimentSpec spec = qgen::ExperimentSpec::from_json(j);
    if (!out_dir_override.empty()) {
        spec.out_dir = out_dir_override;
    }
    if (spec.out_dir.empty()) {
        std::cerr << "error: spec has no out_dir and --out was not given\n";
        return 1;
    }
    const qgen::ExperimentSummary summary = qgen::run_experiment(spec);
    std::cout << "best KL per seed:";
    for (double kl : summary.per_seed_best_kl) {
        std::printf(" %.6f", kl);
    }
    std::printf("\nmean %.6f  stddev %.6f\n", summary.mean_best_kl, summary.stddev_best_kl);
    std::cout << "artifacts in " << spec.out_dir << "\n";
    return 0;
}

int cmd_evaluate(const std::string& samples, const std::string& reference, int precision,
                 const std::string& transform_path, const std::string& out_path) {
    const json report = qgen::evaluate_files(samples, reference, precision, transform_path);
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        qgen::atomic_write_file(out_path, text);
    }
    return 0;
}

int cmd_resources(int d_min, int d_max, std::vector<int> precisions, int nb_cont, int nb_disc,
                  int shots, const std::string& out_path) {
    if (precisions.empty()) {
        precisions = {4, 8};
    }
    for (int r : precisions) {
        if (r < 2) {
            throw std::invalid_argument("resources: discrete precision must be >= 2");
        }
    }
    const std::string csv =
        qgen::resources_csv(d_min, d_max, precisions, nb_cont, nb_disc, shots);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        qgen::atomic_write_file(out_path, csv);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum generative model benchmarking toolkit"};
    app.require_subcommand(1);

    // gen-data
    std::string gd_name;
    int gd_dim = 2;
    std::int64_t gd_n = 50000;
    std::uint64_t gd_seed = 1;
    std::vector<std::string> gd_csvs;
    std::string gd_out = "dataset";
    auto* gen_data = app.add_subcommand("gen-data", "generate or ingest a dataset");
    gen_data->add_option("--name", gd_name, "mg | x | o | stocks")->required();
    gen_data->add_option("--dim", gd_dim, "data dimension (2 or 3)");
    gen_data->add_option("--n", gd_n, "number of points (synthetic families)");
    gen_data->add_option("--seed", gd_seed, "generator seed");
    gen_data->add_option("--csv", gd_csvs, "stocks: one price CSV per dimension");
    gen_data->add_option("--out", gd_out, "output prefix (<out>.csv, <out>.meta.json)");

    // transform
    std::string tf_kind = "pit";
    std::string tf_data;
    std::string tf_out = "transformed";
    auto* transform = app.add_subcommand("transform", "fit and apply a data transformation");
    transform->add_option("--kind", tf_kind, "minmax | pit");
    transform->add_option("--data", tf_data, "input points CSV")->required();
    transform->add_option("--out", tf_out, "output prefix (<out>.csv, <out>.model.json)");

    // train
    std::string tr_spec;
    std::string tr_out;
    auto* train = app.add_subcommand("train", "run a training experiment from a JSON spec");
    train->add_option("--spec", tr_spec, "experiment spec JSON")->required();
    train->add_option("--out", tr_out, "run directory (overrides spec out_dir)");

    // evaluate
    std::string ev_samples;
    std::string ev_reference;
    int ev_precision = 4;
    std::string ev_transform;
    std::string ev_out;
    auto* evaluate = app.add_subcommand("evaluate", "KL divergence between two sample files");
    evaluate->add_option("--samples", ev_samples, "model samples CSV")->required();
    evaluate->add_option("--reference", ev_reference, "reference data CSV")->required();
    evaluate->add_option("-r,--precision", ev_precision, "grid precision (2^r bins per dim)");
    evaluate->add_option("--transform", ev_transform, "transform model JSON to apply first");
    evaluate->add_option("--out", ev_out, "report path (stdout if omitted)");

    // resources
    int rs_dmin = 1;
    int rs_dmax = 100;
    std::vector<int> rs_r;
    int rs_nb_cont = 8;
    int rs_nb_disc = 3;
    int rs_shots = 100;
    std::string rs_out;
    auto* resources = app.add_subcommand("resources", "closed-form hardware resource estimates");
    resources->add_option("--d-min", rs_dmin, "smallest data dimension");
    resources->add_option("--d-max", rs_dmax, "largest data dimension");
    resources->add_option("-r,--precision", rs_r, "discrete precisions (default 4 8)");
    resources->add_option("--nb-continuous", rs_nb_cont, "continuous circuit blocks");
    resources->add_option("--nb-discrete", rs_nb_disc, "discrete circuit blocks");
    resources->add_option("--shots", rs_shots, "shots per continuous sample (N_s)");
    resources->add_option("--out", rs_out, "CSV path (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_data->parsed()) {
            return cmd_gen_data(gd_name, gd_dim, gd_n, gd_seed, gd_csvs, gd_out);
        }
        if (transform->parsed()) {
            return cmd_transform(tf_kind, tf_data, tf_out);
        }
        if (train->parsed()) {
            return cmd_train(tr_spec, tr_out);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(ev_samples, ev_reference, ev_precision, ev_transform, ev_out);
        }
        if (resources->parsed()) {
            return cmd_resources(rs_dmin, rs_dmax, rs_r, rs_nb_cont, rs_nb_disc, rs_shots,
                                 rs_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
