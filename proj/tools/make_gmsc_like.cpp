#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "credaug/error.hpp"
#include "credaug/gmsc_like.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a GMSC-shaped CSV for offline end-to-end runs"};
  std::string path;
  credaug::GmscLikeOptions options;
  app.add_option("output", path, "CSV path")->required();
  app.add_option("--rows", options.complete_rows, "Complete rows");
  app.add_option("--positives", options.positives, "Defaults among complete rows");
  app.add_option("--incomplete", options.incomplete_rows, "Rows with an NA field");
  app.add_option("--seed", options.seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);
  try {
    credaug::write_gmsc_like_csv(path, options);
  } catch (const credaug::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
