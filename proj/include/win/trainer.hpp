#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "win/checkpoint.hpp"
#include "win/metrics.hpp"
#include "win/model.hpp"
#include "win/stream.hpp"

namespace win {

struct TrainConfig {
    ModelConfig model;
    SigmaRegime regime = SigmaRegime::single;
    float sigma = 30.0f;
    float sigma_lo = 0.0f;
    float sigma_hi = 70.0f;

    int epochs = 1;
    int steps_per_epoch = 100;
    int batch = 32;
    float learning_rate = 1e-3f;

    int patch = 64;
    int stride = 32;
    bool augment = true;
    bool fixed_noise = false;

    std::uint64_t seed = 0;
    std::int64_t checkpoint_every = 0;  // steps; 0 = final checkpoint only
    int eval_every = 0;                 // epochs; 0 = final eval only

    std::vector<float> eval_sigmas;     // defaults to the training sigma(s)
    std::string train_manifest;
    std::string eval_manifest;
    std::string out_dir;
    std::string name = "model";

    std::int64_t total_steps() const { return static_cast<std::int64_t>(epochs) * steps_per_epoch; }
    std::string regime_string() const;
    void validate() const;  // throws ConfigError
};

// Parses the documented JSON schema (see README). Relative manifest paths
// resolve against the config file's directory.
TrainConfig train_config_from_json_file(const std::string& path);
TrainConfig train_config_from_json_text(const std::string& text, const std::string& base_dir = "");

struct TrainLog {
    std::vector<std::pair<std::int64_t, double>> loss;  // (step, loss), steps 1-based
    struct Eval {
        int epoch = 0;
        float sigma = 0.0f;
        double psnr = 0.0;
        double ssim = 0.0;
    };
    std::vector<Eval> evals;
    double wall_seconds = 0.0;

    // `step,loss` section followed by an `epoch,sigma,psnr,ssim` section.
    void write_csv(std::ostream& os) const;
};

// Initial rate halved after each third of the total epoch budget.
float learning_rate_at(const TrainConfig& cfg, std::int64_t step);

class Trainer {
  public:
    Trainer(const TrainConfig& cfg, const std::vector<GrayImage>& corpus);
    Trainer(const TrainConfig& cfg, const std::vector<GrayImage>& corpus, const LoadedCheckpoint& resume);

    // One optimization step: stream batch -> forward -> MSE against clean ->
    // backward -> Adam. Returns false (and leaves the model at its last
    // finite state) when loss or gradients go non-finite.
    bool step();

    // Runs to the configured step budget with cadence checkpoints, then the
    // final eval (when an eval corpus is supplied) and the final checkpoint.
    // Throws DivergenceError after writing the last good checkpoint if
    // training diverges.
    void run(const std::vector<GrayImage>& eval_corpus = {}, const std::vector<std::string>& eval_names = {});

    Model& model() { return model_; }
    const Model& model() const { return model_; }
    const OptState& opt() const { return opt_; }
    const TrainLog& log() const { return log_; }
    std::int64_t current_step() const { return step_; }
    bool diverged() const { return diverged_; }
    TrainMeta meta() const;
    std::string checkpoint_path() const;

  private:
    void write_checkpoint() const;

    TrainConfig cfg_;
    TrainingStream stream_;
    Model model_;
    OptState opt_;
    TrainLog log_;
    std::int64_t step_ = 0;
    bool diverged_ = false;
};

// Noise seed used for the (sigma, image) grid during evaluation; shared
// with the CLI so panel and eval metrics agree bit-for-bit.
std::uint64_t eval_noise_seed(std::uint64_t base, std::size_t sigma_idx, std::size_t image_idx);

// Corrupts every image at every sigma with seeded AWGN, runs infer-mode
// forward on the full image, clips, and scores PSNR/SSIM against the clean
// original.
MetricsReport evaluate(const Model& m, const std::vector<GrayImage>& images,
                       const std::vector<std::string>& names, const std::vector<float>& sigmas,
                       std::uint64_t seed, const std::string& method);

struct CurvePoint {
    float sigma = 0.0f;
    double mean_psnr = 0.0;
};

// (sigma, mean PSNR) pairs sorted by sigma. Throws on an empty report.
std::vector<CurvePoint> behavior_curve(const MetricsReport& report);

// CSV `sigma,mean_psnr`.
void write_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& os);

}  // namespace win
