#pragma once

#include <memory>
#include <string>

#include "maintminer/error.hpp"

namespace maintminer::cli {

/// Missing bundle or unsupported schema_version.
class StartupError : public Error {
 public:
  using Error::Error;
};

class BindError : public Error {
 public:
  using Error::Error;
};

/// Read-only HTTP view of an exported bundle directory. Files are read once
/// at construction and never written.
///
///   GET /api/bundle                  bundle.json as exported
///   GET /api/projects                project names and totals
///   GET /api/profiles?project=&window=&developer=
///                                    windowed series re-bucketed from daily counts
///   GET /api/homogeneity             homogeneity tables
///   GET /api/datasets/<name>.csv     files under datasets/, byte for byte
///
/// Anything else is a JSON error body with status 404 (405 for non-GET).
class BundleServer {
 public:
  explicit BundleServer(const std::string& bundle_dir);
  ~BundleServer();

  /// Port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); requires bind().
  void listen();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace maintminer::cli
