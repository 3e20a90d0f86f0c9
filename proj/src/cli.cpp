namespace camo {}
