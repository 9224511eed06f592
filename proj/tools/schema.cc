// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "schema.h"

#include "json.hpp"

namespace flowground::cli {
namespace {

using nlohmann::json;

json int_array() { return {{"type", "array"}, {"items", {{"type", "integer"}}}}; }

json number_array() {
  return {{"type", "array"}, {"items", {{"type", "number"}}}};
}

json object(json properties, json required) {
  return {{"type", "object"},
          {"properties", std::move(properties)},
          {"required", std::move(required)}};
}

json edge_list() {
  return {{"type", "array"},
          {"items",
           {{"type", "array"},
            {"items", {{"type", "integer"}}},
            {"minItems", 2},
            {"maxItems", 2}}}};
}

}  // namespace

std::string schema_document() {
  json flow_node = object({{"id", {{"type", "integer"}, {"minimum", 0}}},
                           {"label", {{"type", "string"}}},
                           {"virtual", {{"type", "boolean"}}}},
                          {"id"});
  json tsort_node = object({{"id", {{"type", "integer"}}},
                            {"label", {{"type", "string"}}},
                            {"active", {{"type", "integer"}}},
                            {"mark", int_array()},
                            {"emitted", int_array()}},
                           {"id", "active", "mark", "emitted"});
  json doc;
  doc["$schema"] = "http://json-schema.org/draft-07/schema#";
  json& f = doc["formats"];
  f["flow_graph"] = object(
      {{"nodes", {{"type", "array"}, {"items", flow_node}}}, {"edges", edge_list()}},
      {"nodes"});
  f["tsort_graph"] = object({{"algorithm", {{"enum", {"forward", "backward"}}}},
                             {"root", {{"type", "integer"}}},
                             {"sink", {{"type", "integer"}}},
                             {"nodes", {{"type", "array"}, {"items", tsort_node}}},
                             {"edges", edge_list()}},
                            {"algorithm", "root", "sink", "nodes", "edges"});
  f["alignment"] = object(
      {{"cost", {{"type", {"number", "null"}}}},
       {"tau_star", int_array()},
       {"segments",
        {{"type", "object"},
         {"additionalProperties",
          {{"type", "array"}, {"items", {{"type", "integer"}}}, {"minItems", 2},
           {"maxItems", 2}}}}},
       {"dropped", int_array()},
       {"labels", int_array()}},
      {"cost", "tau_star", "segments", "dropped"});
  f["ground_truth"] = object({{"labels", int_array()}, {"sort", int_array()}},
                             {"labels"});
  f["bench_report"] = object({{"n_sorts", {{"type", "integer"}}},
                              {"n_tsort_nodes", {{"type", "integer"}}},
                              {"repeats", {{"type", "integer"}}},
                              {"t_brute_ms", {{"type", "number"}}},
                              {"t_graph_ms", {{"type", "number"}}},
                              {"speedup", {{"type", {"number", "null"}}}},
                              {"rho_predicted", {{"type", "number"}}},
                              {"brute_cost", {{"type", {"number", "null"}}}},
                              {"graph_cost", {{"type", {"number", "null"}}}}},
                             {"n_sorts", "n_tsort_nodes", "t_brute_ms",
                              "t_graph_ms", "speedup", "rho_predicted"});
  f["eval"] = object({{"accuracy", {{"type", "number"}}},
                      {"iou", {{"type", "number"}}},
                      {"denominator", {{"enum", {"all", "steps"}}}}},
                     {"accuracy", "iou"});
  f["counts"] = object({{"spec", int_array()},
                        {"n_sorts", {{"type", {"integer", "string"}}}},
                        {"n_tsort_nodes", {{"type", {"integer", "string"}}}},
                        {"rho", {{"type", "number"}}}},
                       {"spec", "n_sorts", "n_tsort_nodes", "rho"});
  f["sorts"] = object({{"count", {{"type", "integer"}}},
                       {"sorts", {{"type", "array"}, {"items", int_array()}}}},
                      {"count", "sorts"});
  f["validation"] = object({{"nodes", {{"type", "integer"}}},
                            {"edges", {{"type", "integer"}}},
                            {"steps", {{"type", "integer"}}},
                            {"normalized", {{"type", "boolean"}}}},
                           {"nodes", "edges", "steps", "normalized"});
  f["synth_manifest"] = object({{"count", {{"type", "integer"}}},
                                {"instances", {{"type", "array"},
                                               {"items", {{"type", "string"}}}}},
                                {"params", {{"type", "object"}}}},
                               {"count", "instances", "params"});
  f["model"] = object({{"weight", {{"type", "array"}, {"items", number_array()}}},
                       {"bias", number_array()}},
                      {"weight", "bias"});
  return doc.dump(2) + "\n";
}

}  // namespace flowground::cli
