#include "app.hpp"

int main(int argc, char** argv) { return roughcurve::app::main_entry(argc, argv); }
