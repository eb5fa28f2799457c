#include "codesign/sim/episode_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "codesign/common/errors.hpp"
#include "codesign/common/kvdoc.hpp"

namespace codesign::sim {

namespace {

void put(std::ostream& out, const char* key, double v, int indent = 0) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%*s%s: %.17g\n", indent, "", key, v);
  out << buf;
}

std::string vec_text(const double* v, int n) {
  std::string out;
  char buf[40];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), i ? " %.17g" : "%.17g", v[i]);
    out += buf;
  }
  return out;
}

}  // namespace

std::string episode_to_text(const TaskEpisode& episode) {
  std::ostringstream out;
  out << "schema_version: 1\n";
  out << "task: " << to_string(episode.id) << "\n";
  out << "seed: " << episode.seed << "\n";
  out << "start_base: " << vec_text(episode.start_base.data(), 3) << "\n";
  put(out, "max_trans_err", episode.max_trans_err);
  put(out, "max_rot_err", episode.max_rot_err);
  out << "horizon: " << episode.horizon << "\n";
  put(out, "door_open_fraction", episode.door_open_fraction);

  out << "map {\n";
  out << "  origin: " << vec_text(episode.map.origin().data(), 2) << "\n";
  out << "  width: " << episode.map.width() << "\n";
  out << "  height: " << episode.map.height() << "\n";
  put(out, "cell_size", episode.map.cell_size(), 2);
  for (const auto& o : episode.map.obstacles()) {
    out << "  obstacle {\n";
    out << "    min: " << vec_text(o.min.data(), 2) << "\n";
    out << "    max: " << vec_text(o.max.data(), 2) << "\n";
    put(out, "top", o.top, 4);
    out << "    blocks_ee: " << (o.blocks_ee ? "true" : "false") << "\n";
    out << "    door_leaf: " << (o.is_door_leaf ? "true" : "false") << "\n";
    out << "  }\n";
  }
  out << "}\n";

  out << "trajectory {\n";
  put(out, "speed", episode.trajectory.speed, 2);
  out << "  kind: " << static_cast<int>(episode.trajectory.kind) << "\n";
  for (const auto& w : episode.trajectory.waypoints) {
    const double q[4] = {w.orientation.w(), w.orientation.x(), w.orientation.y(),
                         w.orientation.z()};
    out << "  waypoint: " << vec_text(w.position.data(), 3) << " " << vec_text(q, 4) << "\n";
  }
  out << "}\n";
  return out.str();
}

TaskEpisode episode_from_text(const std::string& text) {
  const KvEntry doc = parse_kvdoc(text);
  TaskEpisode episode;
  if (static_cast<int>(doc.get_number("schema_version")) != 1)
    throw ParseError("unsupported episode schema", 1, "schema_version");
  episode.id = task_from_string(doc.get_string("task"));
  episode.seed = static_cast<std::uint64_t>(doc.get_number("seed"));
  {
    const auto v = doc.require("start_base").numbers();
    if (v.size() != 3) throw ParseError("start_base needs 3 numbers", 0, "start_base");
    episode.start_base = {v[0], v[1], v[2]};
  }
  episode.max_trans_err = doc.get_number("max_trans_err");
  episode.max_rot_err = doc.get_number("max_rot_err");
  episode.horizon = static_cast<int>(doc.get_number("horizon"));
  episode.door_open_fraction = doc.get_number("door_open_fraction");

  const KvEntry& map = doc.require("map");
  const auto origin = map.require("origin").numbers();
  episode.map = OccupancyMap({origin[0], origin[1]}, static_cast<int>(map.get_number("width")),
                             static_cast<int>(map.get_number("height")),
                             map.get_number("cell_size"));
  for (const KvEntry* ob : map.find_all("obstacle")) {
    ObstacleRect o;
    const auto mn = ob->require("min").numbers();
    const auto mx = ob->require("max").numbers();
    o.min = {mn[0], mn[1]};
    o.max = {mx[0], mx[1]};
    o.top = ob->get_number("top");
    o.blocks_ee = ob->get_bool("blocks_ee", true);
    o.is_door_leaf = ob->get_bool("door_leaf", false);
    episode.map.add_obstacle(o);
  }

  const KvEntry& traj = doc.require("trajectory");
  episode.trajectory.speed = traj.get_number("speed");
  episode.trajectory.kind = static_cast<TrajKind>(static_cast<int>(traj.get_number("kind")));
  for (const KvEntry* w : traj.find_all("waypoint")) {
    const auto v = w->numbers();
    if (v.size() != 7) throw ParseError("waypoint needs 7 numbers", w->line, "waypoint");
    kin::Pose p;
    p.position = {v[0], v[1], v[2]};
    p.orientation = Eigen::Quaterniond(v[3], v[4], v[5], v[6]);
    episode.trajectory.waypoints.push_back(p);
  }
  return episode;
}

void write_episode(const TaskEpisode& episode, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write episode file: " + path);
  out << episode_to_text(episode);
  if (!out) throw IoError("failed writing episode file: " + path);
}

TaskEpisode read_episode(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open episode file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return episode_from_text(ss.str());
}

}  // namespace codesign::sim
