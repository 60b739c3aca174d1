#include "win/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "win/errors.hpp"
#include "win/noise.hpp"
#include "win/ops.hpp"
#include "win/rng.hpp"

namespace win {
namespace {

using nlohmann::json;

StreamConfig stream_config(const TrainConfig& cfg) {
    StreamConfig sc;
    sc.regime = cfg.regime;
    sc.sigma = cfg.sigma;
    sc.sigma_lo = cfg.sigma_lo;
    sc.sigma_hi = cfg.sigma_hi;
    sc.patch = cfg.patch;
    sc.stride = cfg.stride;
    sc.batch = cfg.batch;
    sc.augment = cfg.augment;
    sc.fixed_noise = cfg.fixed_noise;
    sc.seed = cfg.seed;
    return sc;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string TrainConfig::regime_string() const {
    if (regime == SigmaRegime::single) return "single:" + format_sigma(sigma);
    return "blind:" + format_sigma(sigma_lo) + "-" + format_sigma(sigma_hi);
}

void TrainConfig::validate() const {
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (epochs < 1 || steps_per_epoch < 1 || batch < 1) {
        throw ConfigError("epochs, steps_per_epoch and batch must all be >= 1");
    }
    if (!(learning_rate > 0.0f)) throw ConfigError("learning_rate must be > 0");
    if (patch < 1 || stride < 1) throw ConfigError("patch and stride must be >= 1");
    if (regime == SigmaRegime::single && sigma < 0.0f) throw ConfigError("sigma must be >= 0");
    if (regime == SigmaRegime::blind && (sigma_lo < 0.0f || sigma_hi < sigma_lo)) {
        throw ConfigError("blind sigma range is invalid");
    }
    if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
}

TrainConfig train_config_from_json_text(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    TrainConfig cfg;
    try {
        if (j.contains("model")) {
            const json& m = j["model"];
            if (m.contains("variant")) cfg.model.variant = variant_from_string(m["variant"].get<std::string>());
            if (m.contains("layers")) cfg.model.layers = m["layers"].get<int>();
            if (m.contains("width")) cfg.model.width = m["width"].get<int>();
            if (m.contains("kernel")) cfg.model.kernel = m["kernel"].get<int>();
        }
        if (j.contains("sigma")) {
            const json& s = j["sigma"];
            const std::string regime = s.value("regime", "single");
            if (regime == "single") {
                cfg.regime = SigmaRegime::single;
                cfg.sigma = s.value("value", 30.0f);
            } else if (regime == "blind") {
                cfg.regime = SigmaRegime::blind;
                cfg.sigma_lo = s.value("low", 0.0f);
                cfg.sigma_hi = s.value("high", 70.0f);
            } else {
                throw ConfigError("sigma.regime must be 'single' or 'blind', got '" + regime + "'");
            }
        }
        cfg.epochs = j.value("epochs", cfg.epochs);
        cfg.steps_per_epoch = j.value("steps_per_epoch", cfg.steps_per_epoch);
        cfg.batch = j.value("batch", cfg.batch);
        cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
        cfg.patch = j.value("patch", cfg.patch);
        cfg.stride = j.value("stride", cfg.stride);
        cfg.augment = j.value("augment", cfg.augment);
        cfg.fixed_noise = j.value("fixed_noise", cfg.fixed_noise);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.checkpoint_every = j.value("checkpoint_every", cfg.checkpoint_every);
        cfg.eval_every = j.value("eval_every", cfg.eval_every);
        if (j.contains("eval_sigmas")) cfg.eval_sigmas = j["eval_sigmas"].get<std::vector<float>>();
        cfg.train_manifest = j.value("train_manifest", cfg.train_manifest);
        cfg.eval_manifest = j.value("eval_manifest", cfg.eval_manifest);
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
        cfg.name = j.value("name", cfg.name);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field has wrong type: ") + e.what());
    }

    if (!base_dir.empty()) {
        auto resolve = [&](std::string& p) {
            if (!p.empty() && std::filesystem::path(p).is_relative()) {
                p = (std::filesystem::path(base_dir) / p).string();
            }
        };
        resolve(cfg.train_manifest);
        resolve(cfg.eval_manifest);
        resolve(cfg.out_dir);
    }
    cfg.validate();
    return cfg;
}

TrainConfig train_config_from_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return train_config_from_json_text(ss.str(), std::filesystem::path(path).parent_path().string());
}

void TrainLog::write_csv(std::ostream& os) const {
    os << "step,loss\n";
    for (const auto& [step, l] : loss) os << step << "," << fmt(l) << "\n";
    os << "\nepoch,sigma,psnr,ssim\n";
    for (const auto& e : evals) {
        os << e.epoch << "," << format_sigma(e.sigma) << "," << fmt(e.psnr) << "," << fmt(e.ssim) << "\n";
    }
}

float learning_rate_at(const TrainConfig& cfg, std::int64_t step) {
    const std::int64_t epoch = step / cfg.steps_per_epoch;
    const int halvings = static_cast<int>(std::min<std::int64_t>(2, 3 * epoch / cfg.epochs));
    return cfg.learning_rate * std::pow(0.5f, static_cast<float>(halvings));
}

Trainer::Trainer(const TrainConfig& cfg, const std::vector<GrayImage>& corpus)
    : cfg_(cfg), stream_(corpus, stream_config(cfg)), model_(build_model(cfg.model, cfg.seed)),
      opt_(OptState::like(model_)) {
    cfg_.validate();
}

Trainer::Trainer(const TrainConfig& cfg, const std::vector<GrayImage>& corpus, const LoadedCheckpoint& resume)
    : cfg_(cfg), stream_(corpus, stream_config(cfg)), model_(resume.model),
      opt_(resume.opt ? *resume.opt : OptState::like(model_)), step_(resume.meta.step) {
    cfg_.validate();
}

TrainMeta Trainer::meta() const {
    TrainMeta m;
    m.step = step_;
    m.epoch = step_ / cfg_.steps_per_epoch;
    m.sigma_regime = cfg_.regime_string();
    m.seed = cfg_.seed;
    return m;
}

std::string Trainer::checkpoint_path() const {
    const std::filesystem::path dir = cfg_.out_dir.empty() ? "." : cfg_.out_dir;
    return (dir / (cfg_.name + ".winckpt")).string();
}

void Trainer::write_checkpoint() const {
    if (cfg_.out_dir.empty()) return;  // tests run in-memory; the CLI always sets out_dir
    std::filesystem::create_directories(cfg_.out_dir);
    const TrainMeta m = meta();
    save_checkpoint(model_, checkpoint_path(), &opt_, &m);
}

bool Trainer::step() {
    if (diverged_) return false;
    const auto batch = stream_.batch(step_);

    ForwardCache cache;
    const Tensor out = forward(model_, batch.noisy, Mode::train, &cache);
    const MseResult mse = mse_loss(out, batch.clean);
    if (!std::isfinite(mse.loss)) {
        diverged_ = true;
        return false;
    }

    try {
        const ModelGrads grads = backward(model_, cache, mse.grad);
        adam_step(collect_params(model_), collect_grads(grads), opt_, learning_rate_at(cfg_, step_));
    } catch (const DivergenceError&) {
        diverged_ = true;
        return false;
    }

    step_ += 1;
    log_.loss.emplace_back(step_, mse.loss);
    return true;
}

void Trainer::run(const std::vector<GrayImage>& eval_corpus, const std::vector<std::string>& eval_names) {
    const auto started = std::chrono::steady_clock::now();
    const std::int64_t total = cfg_.total_steps();

    std::vector<float> eval_sigmas = cfg_.eval_sigmas;
    if (eval_sigmas.empty()) {
        if (cfg_.regime == SigmaRegime::single) {
            eval_sigmas = {cfg_.sigma};
        } else {
            eval_sigmas = {10.0f, 30.0f, 50.0f, 70.0f};
        }
    }
    auto run_eval = [&](int epoch) {
        if (eval_corpus.empty()) return;
        const MetricsReport report =
            evaluate(model_, eval_corpus, eval_names, eval_sigmas, cfg_.seed, cfg_.name);
        for (const auto& mean : report.means()) {
            log_.evals.push_back({epoch, mean.sigma, mean.psnr_db, mean.ssim});
        }
    };

    while (step_ < total) {
        if (!step()) {
            // keep the last finite state on disk before reporting failure
            bool params_finite = true;
            for (auto span : collect_params(model_)) {
                for (float v : span) {
                    if (!std::isfinite(v)) {
                        params_finite = false;
                        break;
                    }
                }
                if (!params_finite) break;
            }
            if (params_finite) write_checkpoint();
            log_.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            throw DivergenceError("training diverged at step " + std::to_string(step_ + 1) +
                                  "; last good checkpoint: " + checkpoint_path());
        }
        if (cfg_.checkpoint_every > 0 && step_ % cfg_.checkpoint_every == 0) write_checkpoint();
        if (cfg_.eval_every > 0 && step_ % (static_cast<std::int64_t>(cfg_.eval_every) * cfg_.steps_per_epoch) == 0) {
            run_eval(static_cast<int>(step_ / cfg_.steps_per_epoch));
        }
    }
    run_eval(cfg_.epochs);
    log_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_checkpoint();
}

std::uint64_t eval_noise_seed(std::uint64_t base, std::size_t sigma_idx, std::size_t image_idx) {
    return seed_mix(base, 0x6576616cULL + sigma_idx, image_idx);
}

MetricsReport evaluate(const Model& m, const std::vector<GrayImage>& images,
                       const std::vector<std::string>& names, const std::vector<float>& sigmas,
                       std::uint64_t seed, const std::string& method) {
    MetricsReport report;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        for (std::size_t ii = 0; ii < images.size(); ++ii) {
            const ImagePair pair = add_awgn(images[ii], sigmas[si], eval_noise_seed(seed, si, ii));
            const Tensor out = infer_forward(m, to_tensor(pair.noisy));
            const GrayImage denoised = clipped(to_image(out));
            MetricsRow row;
            row.method = method;
            row.sigma = sigmas[si];
            row.image = ii < names.size() ? names[ii] : "img" + std::to_string(ii);
            row.psnr_db = psnr(images[ii], denoised);
            row.ssim = ssim(images[ii], denoised);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::vector<CurvePoint> behavior_curve(const MetricsReport& report) {
    if (report.rows.empty()) throw std::invalid_argument("behavior_curve: empty report");
    std::vector<CurvePoint> curve;
    for (const auto& mean : report.means()) {
        auto it = std::find_if(curve.begin(), curve.end(),
                               [&](const CurvePoint& p) { return p.sigma == mean.sigma; });
        if (it == curve.end()) {
            curve.push_back({mean.sigma, mean.psnr_db});
        }
    }
    std::sort(curve.begin(), curve.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.sigma < b.sigma; });
    return curve;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& os) {
    os << "sigma,mean_psnr\n";
    for (const auto& p : curve) os << format_sigma(p.sigma) << "," << fmt(p.mean_psnr) << "\n";
}

}  // namespace win
