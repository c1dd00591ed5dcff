//===- passes.cpp - Transformation pass flags -----------------------------===//

#include "polyhls/driver/passes.hpp"
#include "polyhls/transform/transforms.hpp"

#include <charconv>

namespace polyhls::driver {

namespace {

const char *flag_name(PassKind k) {
  switch (k) {
  case PassKind::Tile:
    return "-tile";
  case PassKind::Skew:
    return "-skew";
  case PassKind::Wavefront:
    return "-wavefront";
  case PassKind::SubBBTile:
    return "-subbb-tile";
  }
  return "?";
}

std::vector<Int> parse_list(std::string_view flag, std::string_view text) {
  std::vector<Int> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    Int v = 0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size())
      fail(ErrorKind::InvalidArgument,
           std::string(flag) + ": expected a comma-separated integer list, got '" +
               std::string(text) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos)
      return out;
    pos = comma + 1;
  }
}

} // namespace

std::string Pass::spelling() const {
  std::string s = flag_name(kind);
  for (std::size_t k = 0; k < args.size(); ++k)
    s += (k ? "," : "=") + std::to_string(args[k]);
  return s;
}

std::optional<Pass> parse_pass_flag(std::string_view arg) {
  std::string_view name = arg.substr(0, arg.find('='));
  std::optional<std::string_view> value;
  if (name.size() < arg.size())
    value = arg.substr(name.size() + 1);
  for (PassKind k : {PassKind::Tile, PassKind::Skew, PassKind::Wavefront, PassKind::SubBBTile}) {
    if (name != flag_name(k))
      continue;
    Pass p{k, {}};
    if (k == PassKind::Wavefront) {
      if (value)
        fail(ErrorKind::InvalidArgument, "-wavefront takes no value");
      return p;
    }
    if (!value)
      fail(ErrorKind::InvalidArgument, std::string(name) + " needs a value");
    p.args = parse_list(name, *value);
    if (k == PassKind::Skew && p.args.size() != 3)
      fail(ErrorKind::InvalidArgument, "-skew expects three values A,B,F");
    return p;
  }
  return std::nullopt;
}

scop::Scop apply_pass(const scop::Scop &scop, const Pass &pass) {
  switch (pass.kind) {
  case PassKind::Tile:
    return transform::tile(scop, {pass.args, std::nullopt});
  case PassKind::SubBBTile:
    return transform::sub_bounding_box_tile(scop, {pass.args, std::nullopt});
  case PassKind::Wavefront:
    return transform::wavefront(scop);
  case PassKind::Skew: {
    auto level = [&](Int v) {
      if (v < 0)
        fail(ErrorKind::InvalidArgument, "-skew: negative loop level " + std::to_string(v));
      return static_cast<unsigned>(v);
    };
    return transform::skew(scop, level(pass.args[0]), level(pass.args[1]), pass.args[2]);
  }
  }
  fail(ErrorKind::Internal, "unknown pass");
}

} // namespace polyhls::driver
