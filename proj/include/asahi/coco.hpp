#pragma once

#include <string>
#include <vector>

#include "asahi/scene.hpp"

namespace asahi {

/// COCO-format ground truth: images / annotations (xywh boxes) / categories.
/// Category ids are the class ids; image entries carry id, width, height and
/// file_name. Round-trips losslessly through read_coco_scenes.
void write_coco_scenes(const std::vector<Scene>& scenes, const std::string& path);

/// Loads scenes ordered as they appear in the file's images array.
/// Throws on missing fields or annotations referencing unknown images.
std::vector<Scene> read_coco_scenes(const std::string& path);

}  // namespace asahi
