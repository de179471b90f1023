#include "curvlab/cli.hpp"

int main(int argc, char** argv)
{
    return curvlab::cli_main(argc, argv);
}
