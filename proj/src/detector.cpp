#include "asahi/detector.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "asahi/rng.hpp"

namespace asahi {

namespace {

// Stream tags keep the per-object, false-positive and box draws independent.
constexpr std::uint64_t kObjectStream = 0x0b1ec7;
constexpr std::uint64_t kFalsePositiveStream = 0xfa15e;

std::uint64_t window_key(const OracleParams& params, const PatchContext& ctx) {
  std::uint64_t key = mix64(params.seed, static_cast<std::uint64_t>(ctx.image_id));
  key = mix64(key, ctx.full_image ? 0xffffffffULL : 0);
  key = mix64(key, static_cast<std::uint64_t>(static_cast<std::uint32_t>(ctx.region_x1)) << 32 |
                       static_cast<std::uint32_t>(ctx.region_y1));
  key = mix64(key, static_cast<std::uint64_t>(static_cast<std::uint32_t>(ctx.region_x2)) << 32 |
                       static_cast<std::uint32_t>(ctx.region_y2));
  return key;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double ScoreModel::score_for(double scaled_shorter_edge) const {
  if (scaled_shorter_edge <= 0.0) return 0.0;
  return clamp01(max_score * scaled_shorter_edge / (scaled_shorter_edge + size_half));
}

void OracleParams::validate() const {
  if (min_detectable_px < 0) throw std::invalid_argument("OracleParams: negative detectability");
  if (jitter_sigma < 0) throw std::invalid_argument("OracleParams: negative jitter");
  if (miss_rate < 0 || miss_rate > 1) throw std::invalid_argument("OracleParams: miss rate range");
  if (fp_rate < 0) throw std::invalid_argument("OracleParams: negative false-positive rate");
}

std::vector<Detection> oracle_detect(const std::vector<GtObject>& visible,
                                     const OracleParams& params, const PatchContext& ctx) {
  params.validate();
  const std::uint64_t key = window_key(params, ctx);
  const double detect_scale = std::min(ctx.scale_x, ctx.scale_y);
  std::vector<Detection> detections;
  detections.reserve(visible.size());

  for (std::size_t i = 0; i < visible.size(); ++i) {
    const GtObject& object = visible[i];
    const double scaled_edge = object.box.shorter_edge() * detect_scale;
    if (scaled_edge < params.min_detectable_px) continue;
    SplitMix64 rng(mix64(key, mix64(kObjectStream, i)));
    if (params.miss_rate > 0.0 && rng.bernoulli(params.miss_rate)) continue;

    double x1 = (object.box.x1() - ctx.region_x1) * ctx.scale_x;
    double y1 = (object.box.y1() - ctx.region_y1) * ctx.scale_y;
    double x2 = (object.box.x2() - ctx.region_x1) * ctx.scale_x;
    double y2 = (object.box.y2() - ctx.region_y1) * ctx.scale_y;
    if (params.jitter_sigma > 0.0) {
      x1 += rng.normal(0.0, params.jitter_sigma);
      y1 += rng.normal(0.0, params.jitter_sigma);
      x2 += rng.normal(0.0, params.jitter_sigma);
      y2 += rng.normal(0.0, params.jitter_sigma);
      if (x2 <= x1) x2 = x1 + 0.1;
      if (y2 <= y1) y2 = y1 + 0.1;
    }
    const double score = params.score_model.score_for(scaled_edge);
    detections.emplace_back(object.class_id, score, BBox(x1, y1, x2, y2),
                            ctx.full_image ? Origin::full_inference()
                                           : Origin::slice(ctx.row, ctx.col));
  }

  if (params.fp_rate > 0.0) {
    SplitMix64 rng(mix64(key, kFalsePositiveStream));
    const int extras = rng.poisson(params.fp_rate);
    for (int i = 0; i < extras; ++i) {
      const double w = rng.uniform(2.0, std::max(3.0, ctx.patch_w * 0.2));
      const double h = rng.uniform(2.0, std::max(3.0, ctx.patch_h * 0.2));
      const double x = rng.uniform(0.0, std::max(1.0, ctx.patch_w - w));
      const double y = rng.uniform(0.0, std::max(1.0, ctx.patch_h - h));
      const int class_id = static_cast<int>(rng.next() % 16);
      const double score = rng.uniform(0.02, 0.25);
      detections.emplace_back(class_id, score, BBox(x, y, x + w, y + h),
                              ctx.full_image ? Origin::full_inference()
                                             : Origin::slice(ctx.row, ctx.col));
    }
  }
  return detections;
}

OracleDetector::OracleDetector(const Scene& scene, const OracleParams& params)
    : scene_(&scene), params_(params) {
  params_.validate();
}

std::vector<Detection> OracleDetector::detect(const PatchContext& ctx) {
  std::vector<GtObject> visible;
  for (const GtObject& object : scene_->objects) {
    const bool contained = object.box.x1() >= ctx.region_x1 && object.box.y1() >= ctx.region_y1 &&
                           object.box.x2() <= ctx.region_x2 && object.box.y2() <= ctx.region_y2;
    if (contained) visible.push_back(object);
  }
  return oracle_detect(visible, params_, ctx);
}

CommandResult run_command_capture(const std::string& command, double timeout_seconds) {
  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    throw std::runtime_error("run_command_capture: pipe failed");
  }
  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("run_command_capture: fork failed");
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(out_pipe[1]);
  close(err_pipe[1]);

  CommandResult result;
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
  struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  bool open[2] = {true, true};
  std::string* sinks[2] = {&result.output, &result.diagnostics};
  char buffer[4096];
  while (open[0] || open[1]) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      result.timed_out = true;
      kill(pid, SIGKILL);
      break;
    }
    fds[0].fd = open[0] ? out_pipe[0] : -1;
    fds[1].fd = open[1] ? err_pipe[0] : -1;
    if (poll(fds, 2, static_cast<int>(std::min<long long>(remaining.count(), 200))) < 0) break;
    for (int i = 0; i < 2; ++i) {
      if (!open[i] || !(fds[i].revents & (POLLIN | POLLHUP))) continue;
      const ssize_t n = read(fds[i].fd, buffer, sizeof(buffer));
      if (n > 0) {
        sinks[i]->append(buffer, static_cast<std::size_t>(n));
      } else {
        open[i] = false;
      }
    }
  }
  close(out_pipe[0]);
  close(err_pipe[0]);
  // The child may have closed its streams and kept running; keep honoring
  // the deadline while reaping.
  int status = 0;
  for (;;) {
    const pid_t reaped = waitpid(pid, &status, result.timed_out ? 0 : WNOHANG);
    if (reaped == pid || reaped < 0) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      result.timed_out = true;
      kill(pid, SIGKILL);
      continue;
    }
    usleep(2000);
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -WTERMSIG(status);
  return result;
}

ExternalDetector::ExternalDetector(const Raster& image, std::string command_template,
                                   std::string scratch_dir, double timeout_seconds)
    : image_(&image),
      command_template_(std::move(command_template)),
      scratch_dir_(std::move(scratch_dir)),
      timeout_seconds_(timeout_seconds) {}

std::vector<Detection> ExternalDetector::detect(const PatchContext& ctx) {
  const PatchResult patch =
      extract_patch(*image_, ctx.window(), std::max(ctx.patch_w, ctx.patch_h));
  const std::string path = scratch_dir_ + "/patch_" + std::to_string(ctx.image_id) + "_" +
                           std::to_string(call_count_++) + ".ppm";
  write_ppm(patch.patch, path);

  std::string command = command_template_;
  const std::string placeholder = "{input}";
  for (std::size_t pos = command.find(placeholder); pos != std::string::npos;
       pos = command.find(placeholder)) {
    command.replace(pos, placeholder.size(), path);
  }

  const CommandResult run = run_command_capture(command, timeout_seconds_);
  if (run.timed_out) {
    throw std::runtime_error("external detector timed out after " +
                             std::to_string(timeout_seconds_) + "s: " + command);
  }
  if (run.exit_code != 0) {
    throw std::runtime_error("external detector exited with status " +
                             std::to_string(run.exit_code) + ": " + run.diagnostics);
  }
  std::istringstream stream(run.output);
  std::vector<Detection> detections;
  for (InterchangeRecord& record : parse_interchange(stream)) {
    record.detection.origin =
        ctx.full_image ? Origin::full_inference() : Origin::slice(ctx.row, ctx.col);
    detections.push_back(record.detection);
  }
  return detections;
}

}  // namespace asahi
