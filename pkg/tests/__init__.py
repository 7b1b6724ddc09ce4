# spin-photon-toolkit tests
