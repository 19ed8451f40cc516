# Tests package for kottwitz-toolkit
