#ifndef FBCAP_JSON_IO_HPP
#define FBCAP_JSON_IO_HPP

#include <string>
#include <vector>

#include "fbcap/dp.hpp"
#include "fbcap/sim.hpp"
#include "fbcap/stationary.hpp"
#include "fbcap/waterfill.hpp"

namespace fbcap {

/// Channel config schema: {"a": [..], "c": [..], "sigma_w2": x}.
/// Vectors may be empty (plain AWGN). Malformed input raises ConfigError
/// naming the offending field.
ChannelModel load_channel_config(const std::string& json_text);
ChannelModel load_channel_config_file(const std::string& path);

/// Policy schema: {"stages": [{"d": [..], "e": x}, ...]}
///             or {"stationary": {"d": [..], "e": x}}.
struct PolicySpec {
  std::vector<PolicyStage> stages;
  bool stationary = false;
};
PolicySpec load_policy(const std::string& json_text);
PolicySpec load_policy_file(const std::string& path);

/// Serializers for the CLI. Every document embeds the resolved channel
/// config, the request parameters, and the tool version, so an output file
/// is reproducible on its own. Indented, key-sorted, byte-stable.
std::string channel_config_json(const ChannelModel& model);
std::string stationary_result_json(const StationaryResult& r,
                                   const ChannelModel& model);
std::string first_order_result_json(const FirstOrderResult& r, double a,
                                    double c, double sigma_w2, double P);
std::string butman_result_json(const ButmanResult& r, double c,
                               double sigma_w2, double P);
std::string nblock_result_json(const NBlockResult& r,
                               const ChannelModel& model);
std::string waterfill_result_json(const WaterfillResult& r,
                                  const ChannelModel& model, double P);
std::string sim_report_json(const SimReport& r, const ChannelModel& model);

}  // namespace fbcap

#endif  // FBCAP_JSON_IO_HPP
