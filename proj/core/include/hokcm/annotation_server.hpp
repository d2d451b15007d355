#pragma once

#include <memory>
#include <string>

#include "hokcm/annotation.hpp"

namespace hokcm {

/// HTTP JSON front end for an AnnotationStore.
///
///   GET  /api/tasks/next?annotator=ID   -> {task_id, phase, sentence} | 204
///   POST /api/scores                    -> 201
///   GET  /api/stats                     -> per-annotator and grand means
///   GET  /api/export                    -> JSONL
///   POST /api/kappa   {"a": [...], "b": [...]} -> {kappa}
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationStore& store);
  ~AnnotationServer();

  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  /// Binds to `port` (0 picks a free port) and returns the bound port, or
  /// -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); blocks.
  bool listen_after_bind();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hokcm
