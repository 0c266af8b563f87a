#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "hemoflow/cli/commands.hpp"

namespace cli = hemoflow::cli;

int main(int argc, char** argv) {
    CLI::App app{"capsule bleeding-monitor pipeline: synthesis, training, deployment, telemetry"};
    app.require_subcommand(1);

    cli::GenOptions gen_opt;
    auto* gen = app.add_subcommand("gen", "synthesize a labeled recording corpus");
    gen->add_option("--config", gen_opt.config_path, "key/value config file");
    gen->add_option("--data", gen_opt.data_dir, "directory with absorption spectra");
    gen->add_option("--out", gen_opt.out_dir, "output dataset directory");
    gen->add_option("--seed", gen_opt.seed, "master RNG seed (wins over config)");
    gen->add_flag("--parallel", gen_opt.parallel, "synthesize recordings on worker threads");

    cli::TrainOptions train_opt;
    auto* train = app.add_subcommand("train", "train the classifier on a generated dataset");
    train->add_option("--config", train_opt.config_path, "key/value config file");
    train->add_option("--dataset", train_opt.dataset_dir, "dataset directory from gen");
    train->add_option("--out", train_opt.out_dir, "output model directory");
    train->add_option("--seed", train_opt.seed, "training RNG seed (wins over config)");

    cli::EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "evaluate a trained model on the test split");
    eval->add_option("--config", eval_opt.config_path, "key/value config file");
    eval->add_option("--model", eval_opt.model_path, "model file from train");
    eval->add_option("--dataset", eval_opt.dataset_dir, "dataset directory from gen");
    eval->add_option("--out", eval_opt.out_dir, "output report directory");

    cli::QuantizeOptions quant_opt;
    auto* quant = app.add_subcommand("quantize", "post-training int8 quantization");
    quant->add_option("--config", quant_opt.config_path, "key/value config file");
    quant->add_option("--model", quant_opt.model_path, "model file from train");
    quant->add_option("--dataset", quant_opt.dataset_dir, "dataset directory (train split calibrates)");
    quant->add_option("--out", quant_opt.out_dir, "output directory");

    cli::QEvalOptions qeval_opt;
    auto* qeval = app.add_subcommand("qeval", "compare int8 inference against the float path");
    qeval->add_option("--config", qeval_opt.config_path, "key/value config file");
    qeval->add_option("--qmodel", qeval_opt.qmodel_path, "quantized model file");
    qeval->add_option("--model", qeval_opt.model_path, "float model file");
    qeval->add_option("--dataset", qeval_opt.dataset_dir, "dataset directory from gen");
    qeval->add_option("--out", qeval_opt.out_dir, "output report directory");

    cli::PhysicsCheckOptions phys_opt;
    auto* phys = app.add_subcommand("physics-check", "validate attenuation physics on noise-free data");
    phys->add_option("--config", phys_opt.config_path, "key/value config file");
    phys->add_option("--data", phys_opt.data_dir, "directory with absorption spectra");
    phys->add_option("--out", phys_opt.out_dir, "output directory");

    cli::EnergyReportOptions energy_opt;
    auto* energy = app.add_subcommand("energy-report", "duty-cycle energy accounting and trade-off");
    energy->add_option("--config", energy_opt.config_path, "key/value config file");
    energy->add_option("--cases", energy_opt.cases_path, "duty-cycle cases file");
    energy->add_option("--out", energy_opt.out_dir, "output directory");

    cli::ExportFeaturesOptions feat_opt;
    auto* feat = app.add_subcommand("export-features", "dump hidden-layer embeddings per window");
    feat->add_option("--config", feat_opt.config_path, "key/value config file");
    feat->add_option("--model", feat_opt.model_path, "model file from train");
    feat->add_option("--dataset", feat_opt.dataset_dir, "dataset directory from gen");
    feat->add_option("--split", feat_opt.split, "train, val, or test");
    feat->add_option("--out", feat_opt.out_dir, "output directory");

    cli::EncodeOptions enc_opt;
    auto* enc = app.add_subcommand("encode", "pack a recording into wire-format telemetry frames");
    enc->add_option("--recording", enc_opt.recording_csv, "recording CSV file")->required();
    enc->add_option("--meta", enc_opt.meta_path, "recording metadata file (default: CSV path with .meta)");
    enc->add_option("--out", enc_opt.out_dir, "output directory");

    cli::DecodeOptions dec_opt;
    auto* dec = app.add_subcommand("decode", "unpack telemetry frames back into a CSV table");
    dec->add_option("--in", dec_opt.packed_path, "packed recording file")->required();
    dec->add_option("--out", dec_opt.out_dir, "output directory");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cli::cmd_gen(gen_opt);
        if (train->parsed()) return cli::cmd_train(train_opt);
        if (eval->parsed()) return cli::cmd_eval(eval_opt);
        if (quant->parsed()) return cli::cmd_quantize(quant_opt);
        if (qeval->parsed()) return cli::cmd_qeval(qeval_opt);
        if (phys->parsed()) return cli::cmd_physics_check(phys_opt);
        if (energy->parsed()) return cli::cmd_energy_report(energy_opt);
        if (feat->parsed()) return cli::cmd_export_features(feat_opt);
        if (enc->parsed()) return cli::cmd_encode(enc_opt);
        if (dec->parsed()) return cli::cmd_decode(dec_opt);
        return cli::kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cli::kExitOk : cli::kExitUsage;
    } catch (const hemoflow::util::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitFailure;
    }
}
