# Tests package for socverify
