// placeholder while the module is under construction
