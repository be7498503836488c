#include "asahi/fusion.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace asahi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

PatchContext make_context(const PipelineInput& input, const SliceWindow& window, bool full_image,
                          int resize_target) {
  PatchContext ctx;
  ctx.image_id = input.image_id;
  ctx.source = input.dims;
  ctx.full_image = full_image;
  ctx.row = window.row;
  ctx.col = window.col;
  ctx.region_x1 = window.x1;
  ctx.region_y1 = window.y1;
  ctx.region_x2 = window.x2;
  ctx.region_y2 = window.y2;
  const PatchDims out = patch_output_dims(window.width(), window.height(), resize_target);
  ctx.patch_w = out.width;
  ctx.patch_h = out.height;
  ctx.scale_x = static_cast<double>(out.width) / window.width();
  ctx.scale_y = static_cast<double>(out.height) / window.height();
  return ctx;
}

bool origins_may_collide(const Origin& a, const Origin& b) {
  if (!a.is_slice() || !b.is_slice()) return true;  // full-inference pairs with anything
  if (a.row == b.row && a.col == b.col) return false;  // same slice: leave alone
  return std::abs(a.row - b.row) <= 1 && std::abs(a.col - b.col) <= 1;
}

}  // namespace

void PipelineConfig::validate() const {
  asahi.validate();
  suppression.validate();
  if (parallelism < 0) throw std::invalid_argument("PipelineConfig: negative parallelism");
}

RemapResult remap_to_image(const std::vector<Detection>& patch_dets, const SliceWindow& window,
                           double scale_x, double scale_y) {
  if (!(scale_x > 0.0 && scale_y > 0.0)) {
    throw std::invalid_argument("remap_to_image: scales must be positive");
  }
  RemapResult result;
  result.detections.reserve(patch_dets.size());
  for (const Detection& det : patch_dets) {
    const double x1 = std::max(det.box.x1() / scale_x + window.x1, static_cast<double>(window.x1));
    const double y1 = std::max(det.box.y1() / scale_y + window.y1, static_cast<double>(window.y1));
    const double x2 = std::min(det.box.x2() / scale_x + window.x1, static_cast<double>(window.x2));
    const double y2 = std::min(det.box.y2() / scale_y + window.y1, static_cast<double>(window.y2));
    if (!(x2 > x1 && y2 > y1)) {
      ++result.dropped;
      continue;
    }
    Detection remapped(det.class_id, det.score, BBox(x1, y1, x2, y2),
                       Origin::slice(window.row, window.col));
    result.detections.push_back(remapped);
  }
  return result;
}

PipelineResult run_pipeline(const PipelineInput& input, DetectorAdapter& detector,
                            const PipelineConfig& cfg) {
  cfg.validate();
  AsahiConfig plan_cfg = cfg.asahi;
  if (!cfg.enable_patch_overlap) plan_cfg.overlap_ratio = 0.0;
  return run_planned_pipeline(input, asahi_plan(input.dims, plan_cfg), detector, cfg);
}

PipelineResult run_planned_pipeline(const PipelineInput& input, const SlicePlan& plan,
                                    DetectorAdapter& detector, const PipelineConfig& cfg) {
  cfg.validate();
  PipelineResult result;

  auto stage_start = Clock::now();
  result.grid_rows = plan.rows;
  result.grid_cols = plan.cols;

  std::vector<PatchContext> jobs;
  if (cfg.enable_full_inference) {
    SliceWindow whole{0, 0, input.dims.width, input.dims.height, -1, -1};
    jobs.push_back(make_context(input, whole, true, cfg.asahi.resize_target));
  }
  for (const SliceWindow& window : plan.windows) {
    jobs.push_back(make_context(input, window, false, cfg.asahi.resize_target));
  }
  result.timings.plan_s = seconds_since(stage_start);

  stage_start = Clock::now();
  std::vector<std::vector<Detection>> raw(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  const bool concurrent = detector.capability() == DetectorAdapter::Capability::Concurrent;
  unsigned workers = cfg.parallelism > 0 ? static_cast<unsigned>(cfg.parallelism)
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));
  if (!concurrent || workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      try {
        raw[i] = detector.detect(jobs[i]);
      } catch (...) {
        failures[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
          try {
            raw[i] = detector.detect(jobs[i]);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!failures[i]) continue;
    const std::string where = jobs[i].full_image
                                  ? "full-inference pass"
                                  : "slice (" + std::to_string(jobs[i].row) + "," +
                                        std::to_string(jobs[i].col) + ")";
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("detector failed on " + where + " of image " +
                               std::to_string(input.image_id) + ": " + e.what());
    }
  }
  result.detector_calls = jobs.size();
  for (const PatchContext& job : jobs) {
    result.processed_pixels += static_cast<double>(job.patch_w) * job.patch_h;
  }
  result.timings.inference_s = seconds_since(stage_start);

  stage_start = Clock::now();
  std::vector<Detection> merged;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const PatchContext& job = jobs[i];
    RemapResult remapped = remap_to_image(raw[i], job.window(), job.scale_x, job.scale_y);
    result.dropped_after_remap += remapped.dropped;
    if (job.full_image) {
      for (Detection& det : remapped.detections) det.origin = Origin::full_inference();
      result.raw_full_detections += remapped.detections.size();
    } else {
      result.raw_slice_detections += remapped.detections.size();
    }
    // Deterministic merge order: job order (full pass, then slices row-major),
    // score-descending within a job.
    std::stable_sort(remapped.detections.begin(), remapped.detections.end(),
                     [](const Detection& a, const Detection& b) { return a.score > b.score; });
    merged.insert(merged.end(), remapped.detections.begin(), remapped.detections.end());
  }
  result.merged_detections = merged.size();
  result.timings.merge_s = seconds_since(stage_start);

  stage_start = Clock::now();
  result.detections = cluster_suppress(std::move(merged), cfg.suppression);
  result.final_detections = result.detections.size();
  result.timings.suppress_s = seconds_since(stage_start);
  return result;
}

std::vector<Detection> dedupe_cross_slice(std::vector<Detection> dets,
                                          const SuppressionConfig& cfg) {
  cfg.validate();
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  std::vector<char> alive(dets.size(), 1);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!alive[i]) continue;
    kept.push_back(dets[i]);
    for (std::size_t j = i + 1; j < dets.size(); ++j) {
      if (!alive[j]) continue;
      if (cfg.class_aware && dets[i].class_id != dets[j].class_id) continue;
      if (!origins_may_collide(dets[i].origin, dets[j].origin)) continue;
      if (overlap(cfg.metric, dets[i].box, dets[j].box) > cfg.threshold) alive[j] = 0;
    }
  }
  return kept;
}

}  // namespace asahi
