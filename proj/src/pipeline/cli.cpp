#include "covdiff/pipeline/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "covdiff/geom/obj.hpp"
#include "covdiff/pipeline/config.hpp"
#include "covdiff/pipeline/dataset.hpp"
#include "covdiff/pipeline/evaluate.hpp"
#include "covdiff/pipeline/infer.hpp"
#include "covdiff/pipeline/train.hpp"
#include "covdiff/policy/checkpoint.hpp"
#include "covdiff/traj/csv.hpp"

namespace fs = std::filesystem;

namespace covdiff::pipeline {

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"coverage-trajectory diffusion pipeline"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic mesh + trajectory dataset");
    std::size_t gen_n = 8;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    double gen_r = metrics::kDefaultSprayRadius;
    gen->add_option("--n", gen_n, "number of objects (>= 5)")->required();
    gen->add_option("--seed", gen_seed, "dataset seed");
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--r-spray", gen_r, "spray radius driving the raster pitch");

    // train
    auto* tr = app.add_subcommand("train", "train the diffusion policy");
    std::string tr_manifest, tr_config, tr_out, tr_preset, tr_conditioning;
    TrainConfig tr_cfg;
    double tr_lr = tr_cfg.lr, tr_dropout = tr_cfg.cond_dropout;
    std::size_t tr_batch = tr_cfg.batch, tr_epochs = tr_cfg.epochs, tr_steps = tr_cfg.diffusion_steps;
    std::size_t tr_horizon = tr_cfg.horizon, tr_history = tr_cfg.history_len, tr_points = tr_cfg.cloud_points;
    std::uint64_t tr_seed = 0;
    tr->add_option("--manifest", tr_manifest, "dataset manifest")->required();
    tr->add_option("--config", tr_config, "key = value config file");
    tr->add_option("--out", tr_out, "output directory for ckpt.bin and loss_curve.csv")->required();
    auto* o_preset = tr->add_option("--preset", tr_preset, "paper|desk");
    auto* o_lr = tr->add_option("--lr", tr_lr, "learning rate");
    auto* o_batch = tr->add_option("--batch", tr_batch, "batch size");
    auto* o_epochs = tr->add_option("--epochs", tr_epochs, "training epochs");
    auto* o_steps = tr->add_option("--steps", tr_steps, "diffusion steps K");
    auto* o_horizon = tr->add_option("--horizon", tr_horizon, "poses per generated segment");
    auto* o_history = tr->add_option("--history", tr_history, "history poses fed as condition");
    auto* o_seed = tr->add_option("--seed", tr_seed, "training seed");
    auto* o_dropout = tr->add_option("--cond-dropout", tr_dropout, "condition dropout probability");
    auto* o_cond = tr->add_option("--conditioning", tr_conditioning, "previous|zero|none");
    auto* o_points = tr->add_option("--points", tr_points, "points sampled per object cloud");

    // infer
    auto* inf = app.add_subcommand("infer", "generate a trajectory for a mesh");
    std::string inf_mesh, inf_ckpt, inf_out;
    std::size_t inf_episodes = 0;
    std::uint64_t inf_seed = 0;
    double inf_guidance = 1.0, inf_eta = 0.0, inf_clip = 1.5;
    std::size_t inf_points = 5120;
    inf->add_option("--mesh", inf_mesh, "object OBJ file")->required();
    inf->add_option("--ckpt", inf_ckpt, "checkpoint file")->required();
    inf->add_option("--episodes", inf_episodes, "number of generated segments")->required();
    inf->add_option("--seed", inf_seed, "sampling seed");
    inf->add_option("--out", inf_out, "output trajectory csv")->required();
    inf->add_option("--guidance", inf_guidance, "guidance scale (1 = plain conditional)");
    inf->add_option("--eta", inf_eta, "ddim eta (0 = deterministic)");
    inf->add_option("--clip-x0", inf_clip, "clean-sample clamp during sampling (0 disables)");
    inf->add_option("--points", inf_points, "points sampled from the mesh");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate trajectories against a manifest");
    std::string ev_manifest, ev_dir, ev_out, ev_split = "all";
    double ev_r = metrics::kDefaultSprayRadius;
    ev->add_option("--manifest", ev_manifest, "dataset manifest")->required();
    ev->add_option("--traj-dir", ev_dir, "directory holding <id>.csv trajectories")->required();
    ev->add_option("--r-spray", ev_r, "spray radius for the coverage predicate");
    ev->add_option("--out", ev_out, "output report json")->required();
    ev->add_option("--split", ev_split, "all|train|test");

    // report
    auto* rep = app.add_subcommand("report", "print the aggregate table for a run");
    std::string rep_dir;
    rep->add_option("--run-dir", rep_dir, "directory containing eval.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (gen->parsed()) {
            GeneratorOptions opts;
            opts.r_spray = gen_r;
            generate_synthetic_dataset(gen_n, gen_seed, gen_out, opts);
            std::printf("wrote dataset with %zu objects to %s\n", gen_n, gen_out.c_str());
        } else if (tr->parsed()) {
            TrainConfig cfg;
            if (!tr_config.empty()) cfg = load_train_config_file(tr_config, cfg);
            if (o_preset->count()) apply_preset(cfg, tr_preset);
            if (o_lr->count()) cfg.lr = tr_lr;
            if (o_batch->count()) cfg.batch = tr_batch;
            if (o_epochs->count()) cfg.epochs = tr_epochs;
            if (o_steps->count()) cfg.diffusion_steps = tr_steps;
            if (o_horizon->count()) cfg.horizon = tr_horizon;
            if (o_history->count()) cfg.history_len = tr_history;
            if (o_seed->count()) cfg.seed = tr_seed;
            if (o_dropout->count()) cfg.cond_dropout = tr_dropout;
            if (o_cond->count()) cfg.conditioning = policy::conditioning_from_string(tr_conditioning);
            if (o_points->count()) cfg.cloud_points = tr_points;
            DatasetManifest manifest = load_manifest(tr_manifest);
            TrainResult res = train(manifest, cfg, tr_out);
            std::printf("checkpoint: %s\nloss curve: %s\nfinal loss: %.6g\n", res.checkpoint_path.c_str(),
                        res.loss_curve_path.c_str(), res.epoch_losses.back());
        } else if (inf->parsed()) {
            geom::TriMesh mesh = geom::read_obj_file(inf_mesh);
            policy::Policy policy = policy::load_checkpoint(inf_ckpt);
            InferOptions opts;
            opts.episodes = inf_episodes;
            opts.seed = inf_seed;
            opts.guidance_scale = inf_guidance;
            opts.eta = inf_eta;
            opts.clip_x0 = inf_clip;
            opts.cloud_points = inf_points;
            std::string id = fs::path(inf_out).stem().string();
            traj::TrajectorySet out = infer(mesh, id, policy, opts);
            traj::write_traj_csv_file(out, inf_out);
            std::printf("wrote %zu poses to %s\n", traj::total_pose_count(out), inf_out.c_str());
        } else if (ev->parsed()) {
            DatasetManifest manifest = load_manifest(ev_manifest);
            RunReport run = evaluate(manifest, ev_dir, ev_r, ev_split);
            write_text(ev_out, to_json(run));
            std::printf("%s", report_table(run).c_str());
        } else if (rep->parsed()) {
            fs::path json_path = fs::path(rep_dir) / "eval.json";
            std::ifstream in(json_path);
            if (!in) throw std::runtime_error("cannot open " + json_path.string());
            std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            RunReport run = run_report_from_json(text);
            std::printf("%s", report_table(run).c_str());
            std::string csv_path = (fs::path(rep_dir) / "report.csv").string();
            write_text(csv_path, report_csv(run));
            std::printf("wrote %s\n", csv_path.c_str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace covdiff::pipeline
