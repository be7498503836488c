#include "asahi/coco.hpp"

#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace asahi {

using nlohmann::json;

void write_coco_scenes(const std::vector<Scene>& scenes, const std::string& path) {
  json root;
  root["images"] = json::array();
  root["annotations"] = json::array();
  root["categories"] = json::array();

  std::set<int> class_ids;
  long annotation_id = 1;
  for (const Scene& scene : scenes) {
    root["images"].push_back({{"id", scene.image_id},
                              {"width", scene.dims.width},
                              {"height", scene.dims.height},
                              {"file_name", scene.file_name}});
    for (const GtObject& object : scene.objects) {
      class_ids.insert(object.class_id);
      root["annotations"].push_back({{"id", annotation_id++},
                                     {"image_id", scene.image_id},
                                     {"category_id", object.class_id},
                                     {"bbox", {object.box.x1(), object.box.y1(),
                                               object.box.width(), object.box.height()}},
                                     {"area", area(object.box)},
                                     {"iscrowd", 0}});
    }
  }
  for (int class_id : class_ids) {
    root["categories"].push_back({{"id", class_id}, {"name", "class_" + std::to_string(class_id)}});
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_coco_scenes: cannot open " + path);
  out << root.dump(2) << '\n';
}

std::vector<Scene> read_coco_scenes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_coco_scenes: cannot open " + path);
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw std::runtime_error("read_coco_scenes: invalid JSON in " + path + ": " + e.what());
  }

  std::vector<Scene> scenes;
  std::map<long, std::size_t> index_by_id;
  for (const json& image : root.at("images")) {
    Scene scene;
    scene.image_id = image.at("id").get<long>();
    scene.dims = ImageDims(image.at("width").get<int>(), image.at("height").get<int>());
    scene.file_name = image.value("file_name", "");
    index_by_id[scene.image_id] = scenes.size();
    scenes.push_back(std::move(scene));
  }
  for (const json& ann : root.value("annotations", json::array())) {
    const long image_id = ann.at("image_id").get<long>();
    const auto it = index_by_id.find(image_id);
    if (it == index_by_id.end()) {
      throw std::runtime_error("read_coco_scenes: annotation references unknown image " +
                               std::to_string(image_id));
    }
    const auto& bbox = ann.at("bbox");
    const double x = bbox.at(0).get<double>();
    const double y = bbox.at(1).get<double>();
    const double w = bbox.at(2).get<double>();
    const double h = bbox.at(3).get<double>();
    scenes[it->second].objects.push_back(
        {ann.at("category_id").get<int>(), BBox(x, y, x + w, y + h)});
  }
  return scenes;
}

}  // namespace asahi
