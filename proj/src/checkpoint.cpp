#include "litm/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "binio.hpp"
#include "fsutil.hpp"
#include "litm/config.hpp"

namespace litm {

static constexpr const char* kCkptMagic = "LITMCKPT";
static constexpr int kCkptVersion = 1;

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  ck.config.validate();
  const Vec flat = flatten_params(ck.params);
  if (flat.size() != param_count(ck.config))
    fail(ErrorCode::inconsistent, "checkpoint: parameters do not match the config shape");
  for (double v : flat)
    if (!std::isfinite(v)) fail(ErrorCode::non_finite, "checkpoint: non-finite parameter");

  detail::atomic_write(path, [&](std::ostream& os) {
    os << kCkptMagic << ' ' << kCkptVersion << '\n';
    os << model_config_to_json(ck.config).dump() << '\n';
    os << "PARAMS " << flat.size() << '\n';
    for (double v : flat) detail::write_f64le(os, v);
  });
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::io, "cannot open checkpoint: " + path);

  std::string header;
  if (!std::getline(is, header)) fail(ErrorCode::truncated, "checkpoint: missing header");
  std::istringstream hs(header);
  std::string magic;
  int version = 0;
  hs >> magic >> version;
  if (!hs || magic != kCkptMagic)
    fail(ErrorCode::format_version, "checkpoint: not a " + std::string(kCkptMagic) + " file");
  if (version != kCkptVersion)
    fail(ErrorCode::format_version,
         "checkpoint: unsupported format version " + std::to_string(version));

  std::string config_line;
  if (!std::getline(is, config_line))
    fail(ErrorCode::truncated, "checkpoint: missing config line");
  nlohmann::json cj;
  try {
    cj = nlohmann::json::parse(config_line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::inconsistent, std::string("checkpoint: bad config line: ") + e.what());
  }

  Checkpoint ck;
  ck.config = model_config_from_json(cj);

  std::string params_line;
  if (!std::getline(is, params_line))
    fail(ErrorCode::truncated, "checkpoint: missing parameter header");
  std::istringstream ps(params_line);
  std::string tag;
  std::size_t count = 0;
  ps >> tag >> count;
  if (!ps || tag != "PARAMS")
    fail(ErrorCode::inconsistent, "checkpoint: malformed parameter header");
  if (count != param_count(ck.config))
    fail(ErrorCode::inconsistent,
         "checkpoint: declared parameter count does not match the config shape");

  Vec flat(count);
  for (double& v : flat)
    if (!detail::read_f64le(is, v)) fail(ErrorCode::truncated, "checkpoint: truncated parameters");
  if (is.peek() != std::ifstream::traits_type::eof())
    fail(ErrorCode::inconsistent, "checkpoint: trailing bytes");
  for (double v : flat)
    if (!std::isfinite(v)) fail(ErrorCode::inconsistent, "checkpoint: non-finite parameter");

  ck.params = unflatten_params(ck.config, flat);
  return ck;
}

}  // namespace litm
